//! Exponent sequences, Zeckendorf representations, the limit order on
//! labels, and exact arithmetic in `Z[phi]`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Constant-coefficient linear recurrence
/// `f_{i+1} = c_1 f_i + ... + c_d f_{i-d+1}` with `f_1..f_d` given.
///
/// Terms are 1-based and memoized; clones share the cache.
#[derive(Clone)]
pub struct RecurrentSeq {
    coeffs: Vec<BigInt>,
    init: Vec<BigInt>,
    memo: Arc<RwLock<Vec<BigInt>>>,
}

#[derive(Serialize, Deserialize)]
struct SeqJson {
    coeffs: Vec<String>,
    init: Vec<String>,
}

impl RecurrentSeq {
    pub fn new(coeffs: Vec<BigInt>, init: Vec<BigInt>) -> Result<Self> {
        if coeffs.is_empty() {
            return invalid("recurrence order must be positive");
        }
        if coeffs.len() != init.len() {
            return invalid(format!(
                "recurrence of order {} needs {} initial values, got {}",
                coeffs.len(),
                coeffs.len(),
                init.len()
            ));
        }
        let memo = Arc::new(RwLock::new(init.clone()));
        Ok(Self { coeffs, init, memo })
    }

    pub fn from_i64(coeffs: &[i64], init: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect(), init.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `F^{(k)}` with `k` leading ones; `k = 2` is Fibonacci.
    pub fn kbonacci(k: usize) -> Result<Self> {
        if k == 0 {
            return invalid("k-bonacci order must be positive");
        }
        Self::from_i64(&vec![1; k], &vec![1; k])
    }

    pub fn fibonacci() -> Self {
        Self::kbonacci(2).expect("order 2 is valid")
    }

    /// `f_i = 2^{i-1}`.
    pub fn powers_of_two() -> Self {
        Self::from_i64(&[2], &[1]).expect("order 1 is valid")
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn init(&self) -> &[BigInt] {
        &self.init
    }

    /// The `i`-th term, 1-based.
    pub fn term(&self, i: usize) -> Result<BigInt> {
        if i == 0 {
            return invalid("sequence indices start at 1");
        }
        {
            let memo = self.memo.read().expect("memo lock poisoned");
            if let Some(v) = memo.get(i - 1) {
                return Ok(v.clone());
            }
        }
        let mut memo = self.memo.write().expect("memo lock poisoned");
        let d = self.coeffs.len();
        while memo.len() < i {
            let n = memo.len();
            let mut next = BigInt::zero();
            for (j, c) in self.coeffs.iter().enumerate() {
                next += c * &memo[n - 1 - j];
            }
            debug_assert!(n >= d);
            memo.push(next);
        }
        Ok(memo[i - 1].clone())
    }

    pub fn term_u64(&self, i: usize) -> Result<u64> {
        let v = self.term(i)?;
        v.to_u64()
            .ok_or_else(|| Error::InvalidArgument(format!("term {i} = {v} does not fit an unsigned 64-bit exponent")))
    }

    /// Terms `f_1..f_n`.
    pub fn terms(&self, n: usize) -> Result<Vec<BigInt>> {
        (1..=n).map(|i| self.term(i)).collect()
    }

    pub fn to_json(&self) -> String {
        let j = SeqJson {
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
            init: self.init.iter().map(|c| c.to_string()).collect(),
        };
        serde_json::to_string(&j).expect("plain strings serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: SeqJson = serde_json::from_str(s)?;
        let parse = |v: &[String]| -> Result<Vec<BigInt>> {
            v.iter().map(|x| x.trim().parse::<BigInt>().map_err(|e| Error::Parse(format!("{x:?}: {e}")))).collect()
        };
        Self::new(parse(&j.coeffs)?, parse(&j.init)?)
    }
}

impl fmt::Debug for RecurrentSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RecurrentSeq").field("coeffs", &self.coeffs).field("init", &self.init).finish()
    }
}

impl PartialEq for RecurrentSeq {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.init == other.init
    }
}

/// Classical Fibonacci number with `F_0 = 0`, `F_1 = F_2 = 1`; valid for `n <= 93`.
pub fn fib(n: usize) -> u64 {
    assert!(n <= 93, "F_{n} overflows u64");
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        let c = a + b;
        a = b;
        b = c;
    }
    a
}

/// `floor(i * phi)`, exact: `(i + isqrt(5 i^2)) / 2` since `5 i^2` is never a
/// square for `i > 0`.
pub fn floor_mul_phi(i: u64) -> u64 {
    let five_sq = 5 * (i as u128) * (i as u128);
    let r = five_sq.isqrt();
    ((i as u128 + r) / 2) as u64
}

/// Zeckendorf indices of `n`, strictly increasing, all `>= 2`, pairwise
/// non-consecutive. The summand 1 is `F_2`.
pub fn zeckendorf(mut n: u64) -> Vec<usize> {
    let mut i = 2;
    while i < 93 && fib(i + 1) <= n {
        i += 1;
    }
    let mut out = Vec::new();
    while n > 0 {
        if fib(i) <= n {
            out.push(i);
            n -= fib(i);
            i = i.saturating_sub(2);
        } else {
            i -= 1;
        }
    }
    out.reverse();
    out
}

/// How the implicit terminator of a Zeckendorf index list compares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SentinelConvention {
    /// Parity assigned to the terminator when a parity test is applied.
    pub odd: bool,
    /// Whether the terminator compares above every real index (otherwise as index 0).
    pub beyond: bool,
}

impl Default for SentinelConvention {
    /// Odd terminator placed beyond all indices: the only choice under
    /// which `n < 0` exactly when the lowest index of `n` is even, and under
    /// which the label sequences read in increasing order.
    fn default() -> Self {
        Self { odd: true, beyond: true }
    }
}

impl SentinelConvention {
    pub fn all() -> [Self; 4] {
        [
            Self { odd: true, beyond: true },
            Self { odd: false, beyond: true },
            Self { odd: true, beyond: false },
            Self { odd: false, beyond: false },
        ]
    }
}

/// Compare two naturals in the limit order of the label sequences.
pub fn prec_compare(m: u64, n: u64, conv: SentinelConvention) -> Ordering {
    if m == n {
        return Ordering::Equal;
    }
    let a = zeckendorf(m);
    let b = zeckendorf(n);
    let k = a.iter().zip(&b).take_while(|(x, y)| x == y).count();
    // (value, odd); the sentinel value sorts per the convention.
    let sentinel = (if conv.beyond { usize::MAX } else { 0 }, conv.odd);
    let at = |v: &[usize]| v.get(k).map_or(sentinel, |&i| (i, i % 2 == 1));
    let (x, x_odd) = at(&a);
    let (y, y_odd) = at(&b);
    match (x_odd, y_odd) {
        (false, true) => Ordering::Less,
        (true, false) => Ordering::Greater,
        (false, false) => x.cmp(&y),
        (true, true) => y.cmp(&x),
    }
}

/// `a + b*phi` with `phi^2 = phi + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GoldenInt {
    pub a: BigInt,
    pub b: BigInt,
}

impl GoldenInt {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        Self { a: a.into(), b: b.into() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn phi() -> Self {
        Self::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact sign of `a + b*phi`, using `2(a + b*phi) = (2a + b) + b*sqrt5`.
    pub fn signum(&self) -> i32 {
        let u = BigInt::from(2) * &self.a + &self.b;
        let v = &self.b;
        let su = sign_of(&u);
        let sv = sign_of(v);
        if su == 0 || sv == 0 || su == sv {
            return if su != 0 { su } else { sv };
        }
        let u2 = &u * &u;
        let v2 = BigInt::from(5) * v * v;
        if u2 > v2 {
            su
        } else {
            sv
        }
    }

    /// `phi^i` reduced to `F_{i-1} + F_i*phi`.
    pub fn phi_pow(i: usize) -> Self {
        let (mut prev, mut cur) = (BigInt::one(), BigInt::zero());
        for _ in 0..i {
            let next = &prev + &cur;
            prev = cur;
            cur = next;
        }
        Self { a: prev, b: cur }
    }
}

fn sign_of(x: &BigInt) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl fmt::Display for GoldenInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}phi", self.a, self.b)
    }
}

impl Add for &GoldenInt {
    type Output = GoldenInt;
    fn add(self, rhs: &GoldenInt) -> GoldenInt {
        GoldenInt { a: &self.a + &rhs.a, b: &self.b + &rhs.b }
    }
}

impl Sub for &GoldenInt {
    type Output = GoldenInt;
    fn sub(self, rhs: &GoldenInt) -> GoldenInt {
        GoldenInt { a: &self.a - &rhs.a, b: &self.b - &rhs.b }
    }
}

impl Mul for &GoldenInt {
    type Output = GoldenInt;
    fn mul(self, rhs: &GoldenInt) -> GoldenInt {
        let bd = &self.b * &rhs.b;
        GoldenInt { a: &self.a * &rhs.a + &bd, b: &self.a * &rhs.b + &self.b * &rhs.a + bd }
    }
}

impl Add for GoldenInt {
    type Output = GoldenInt;
    fn add(self, rhs: GoldenInt) -> GoldenInt {
        &self + &rhs
    }
}

impl Sub for GoldenInt {
    type Output = GoldenInt;
    fn sub(self, rhs: GoldenInt) -> GoldenInt {
        &self - &rhs
    }
}

impl Mul for GoldenInt {
    type Output = GoldenInt;
    fn mul(self, rhs: GoldenInt) -> GoldenInt {
        &self * &rhs
    }
}

impl Neg for GoldenInt {
    type Output = GoldenInt;
    fn neg(self) -> GoldenInt {
        GoldenInt { a: -self.a, b: -self.b }
    }
}

impl PartialOrd for GoldenInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GoldenInt {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

/// Exact value of `sum bits[i] * phi^i`.
pub fn phi_power_reduce(bits: &[u8]) -> GoldenInt {
    let mut acc = GoldenInt::zero();
    let mut p = GoldenInt::one();
    let phi = GoldenInt::phi();
    for &bit in bits {
        if bit != 0 {
            acc = &acc + &p;
        }
        p = &p * &phi;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fibonacci_terms() {
        let f = RecurrentSeq::fibonacci();
        let v: Vec<u64> = (1..=5).map(|i| f.term_u64(i).unwrap()).collect();
        assert_eq!(v, [1, 1, 2, 3, 5]);
        assert_eq!(f.term_u64(10).unwrap(), 55);
        assert!(f.term(0).is_err());
        assert_eq!(RecurrentSeq::kbonacci(3).unwrap().term_u64(4).unwrap(), 3);
        assert_eq!(f.term(100).unwrap().to_string(), "354224848179261915075");
    }

    #[test]
    fn json_round_trip() {
        let s = RecurrentSeq::from_i64(&[1, 0, 1], &[1, 1, 1]).unwrap();
        let back = RecurrentSeq::from_json(&s.to_json()).unwrap();
        assert_eq!(s, back);
        assert_eq!(back.term_u64(4).unwrap(), 2);
        assert!(RecurrentSeq::from_json(r#"{"coeffs":["1"],"init":["x"]}"#).is_err());
        assert!(RecurrentSeq::from_json(r#"{"coeffs":["1","1"],"init":["1"]}"#).is_err());
    }

    #[test]
    fn floor_phi() {
        let got: Vec<u64> = (0..8).map(floor_mul_phi).collect();
        assert_eq!(got, [0, 1, 3, 4, 6, 8, 9, 11]);
    }

    #[test]
    fn zeckendorf_examples() {
        assert_eq!(zeckendorf(0), Vec::<usize>::new());
        assert_eq!(zeckendorf(1), vec![2]);
        assert_eq!(zeckendorf(11), vec![4, 6]);
    }

    #[test]
    fn zeckendorf_round_trip_exhaustive() {
        for n in 0..=10_000u64 {
            let z = zeckendorf(n);
            assert_eq!(z.iter().map(|&i| fib(i)).sum::<u64>(), n);
            assert!(z.iter().all(|&i| i >= 2));
            assert!(z.windows(2).all(|w| w[1] >= w[0] + 2), "{n}: {z:?}");
        }
    }

    #[test]
    fn prec_examples() {
        let c = SentinelConvention::default();
        assert_eq!(prec_compare(1, 0, c), Ordering::Less);
        assert_eq!(prec_compare(2, 0, c), Ordering::Greater);
        assert_eq!(prec_compare(7, 7, c), Ordering::Equal);
        assert_eq!(prec_compare(1, 2, c), Ordering::Less);
    }

    #[test]
    fn prec_total_order() {
        let c = SentinelConvention::default();
        let n = 120u64;
        for a in 0..n {
            assert_eq!(prec_compare(a, a, c), Ordering::Equal);
            for b in 0..n {
                let ab = prec_compare(a, b, c);
                assert_eq!(ab, prec_compare(b, a, c).reverse());
                if ab != Ordering::Less {
                    continue;
                }
                for d in 0..n {
                    if prec_compare(b, d, c) == Ordering::Less {
                        assert_eq!(prec_compare(a, d, c), Ordering::Less, "{a} {b} {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn golden_examples() {
        assert_eq!(GoldenInt::zero().signum(), 0);
        assert_eq!(GoldenInt::new(-1, 1).signum(), 1);
        assert_eq!(GoldenInt::phi() * GoldenInt::phi(), GoldenInt::new(1, 1));
        assert_eq!(phi_power_reduce(&[]), GoldenInt::zero());
        assert_eq!(phi_power_reduce(&[0, 0, 1]), GoldenInt::new(1, 1));
        assert_eq!(phi_power_reduce(&[0, 0, 0, 1]), GoldenInt::new(1, 2));
        assert_eq!(GoldenInt::phi_pow(3), GoldenInt::new(1, 2));
    }

    proptest! {
        #[test]
        fn prec_antisymmetric_and_transitive(a in 0u64..2000, b in 0u64..2000, d in 0u64..2000) {
            let c = SentinelConvention::default();
            prop_assert_eq!(prec_compare(a, b, c), prec_compare(b, a, c).reverse());
            if prec_compare(a, b, c) == Ordering::Less && prec_compare(b, d, c) == Ordering::Less {
                prop_assert_eq!(prec_compare(a, d, c), Ordering::Less);
            }
        }

        #[test]
        fn golden_sign_matches_interval(a in -1_000_000i64..=1_000_000, b in -1_000_000i64..=1_000_000) {
            // sqrt5 bracketed to 1e-12; the bracket is decisive away from zero.
            let lo = 2.236_067_977_499;
            let hi = 2.236_067_977_500;
            let (x_lo, x_hi) = {
                let u = (2 * a + b) as f64;
                let (p, q) = (u + b as f64 * lo, u + b as f64 * hi);
                (p.min(q), p.max(q))
            };
            let s = GoldenInt::new(a, b).signum();
            if x_lo > 1e-3 {
                prop_assert_eq!(s, 1);
            } else if x_hi < -1e-3 {
                prop_assert_eq!(s, -1);
            }
            if a == 0 && b == 0 {
                prop_assert_eq!(s, 0);
            }
        }

        #[test]
        fn golden_ring_laws(a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50, e in -50i64..50, f in -50i64..50) {
            let x = GoldenInt::new(a, b);
            let y = GoldenInt::new(c, d);
            let z = GoldenInt::new(e, f);
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x * &y, &y * &x);
        }
    }
}
