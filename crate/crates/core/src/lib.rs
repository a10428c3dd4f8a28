//! Exact computation with Fibonacci-type polynomial products.
//!
//! The crate expands products such as `prod (1 + t x^{F_{i+1}})`, measures
//! their coefficient statistics, builds the grouped triangles and posets
//! that organise those coefficients, and fits or verifies rational
//! generating functions for the resulting sequences. All arithmetic is
//! exact.

pub mod cli;
pub mod error;
pub mod guess;
pub mod monoid;
pub mod polynomials;
pub mod ring;
pub mod sequences;
pub mod stats;
pub mod symfun;
pub mod triangle;

pub use error::{Error, Result};
pub use ring::{Field, Poly, QPoly, RatFunc, Ring, TPoly};
