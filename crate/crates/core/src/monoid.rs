//! Equal-weight tuples of binary words under concatenation, the free
//! generators of the two-row monoid, and rewriting oracles for the
//! Fibonacci and golden-ratio numeration systems.
//!
//! Column `i` (1-based) of a word in `M^{(k)}(r)` carries weight
//! `F^{(k)}_{i+k-1}`, so the first column weighs 1 for every `k`.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{invalid, violated, Error, Result};
use crate::guess::{closed_form, FormParams};
use crate::polynomials::{Limits, ProductSpec};
use crate::ring::{Poly, TPoly};
use crate::sequences::{fib, phi_power_reduce, RecurrentSeq};
use crate::stats::{corr_series, CorrSpec};

/// Longest word representable; rows are packed one column per bit.
pub const MAX_LEN: usize = 64;

/// An `r`-tuple of binary words of common length. Bit `i` of a row is
/// column `i + 1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct MonoidWord {
    len: usize,
    rows: Vec<u64>,
}

impl MonoidWord {
    pub fn empty(r: usize) -> Self {
        Self { len: 0, rows: vec![0; r] }
    }

    /// From explicit 0/1 rows of equal length.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return invalid("a word needs at least one row");
        };
        let len = first.len();
        if len > MAX_LEN {
            return invalid(format!("words are limited to {MAX_LEN} columns"));
        }
        let mut packed = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != len {
                return invalid("rows must have equal length");
            }
            let mut bits = 0u64;
            for (i, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => bits |= 1 << i,
                    _ => return invalid("rows must be 0/1"),
                }
            }
            packed.push(bits);
        }
        Ok(Self { len, rows: packed })
    }

    fn from_bits(len: usize, rows: Vec<u64>) -> Self {
        Self { len, rows }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn arity(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, j: usize) -> Vec<u8> {
        (0..self.len).map(|i| ((self.rows[j] >> i) & 1) as u8).collect()
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.arity()).map(|j| self.row(j)).collect()
    }

    /// Total number of ones, `N(pi)`.
    pub fn ones(&self) -> u32 {
        self.rows.iter().map(|r| r.count_ones()).sum()
    }

    /// Weighted sum of each row under `weights`.
    pub fn row_weights(&self, weights: &[u64]) -> Vec<u64> {
        self.rows.iter().map(|&r| (0..self.len).filter(|&i| (r >> i) & 1 == 1).map(|i| weights[i]).sum()).collect()
    }

    pub fn is_balanced(&self, weights: &[u64]) -> bool {
        let w = self.row_weights(weights);
        w.windows(2).all(|p| p[0] == p[1])
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.arity() != other.arity() {
            return invalid("cannot concatenate words of different arity");
        }
        if self.len + other.len > MAX_LEN {
            return invalid(format!("words are limited to {MAX_LEN} columns"));
        }
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a | (b << self.len)).collect();
        Ok(Self { len: self.len + other.len, rows })
    }

    /// Columns `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        let width = end - start;
        let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
        Self { len: width, rows: self.rows.iter().map(|r| (r >> start) & mask).collect() }
    }

    pub fn swap_rows(&self) -> Self {
        let mut rows = self.rows.clone();
        rows.reverse();
        Self { len: self.len, rows }
    }

    pub fn to_json(&self) -> Value {
        json!(self.rows())
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let rows: Vec<Vec<u8>> = serde_json::from_value(v.clone())?;
        Self::from_rows(&rows)
    }
}

/// `F^{(k)}_{i+k-1}` for `i = 1..=n`.
pub fn column_weights(k: usize, n: usize) -> Result<Vec<u64>> {
    if k < 2 {
        return invalid("k >= 2");
    }
    let seq = RecurrentSeq::kbonacci(k)?;
    (1..=n).map(|i| seq.term_u64(i + k - 1)).collect()
}

/// Default length cap for [`enumerate_elements`].
pub fn default_cap(r: usize) -> usize {
    match r {
        2 => 13,
        3 => 10,
        _ => 8,
    }
}

/// All elements of `M^{(k)}(r)` of length `n`.
pub fn enumerate_elements(k: usize, r: usize, n: usize) -> Result<Vec<MonoidWord>> {
    enumerate_elements_capped(k, r, n, default_cap(r))
}

/// [`enumerate_elements`] with an explicit length cap.
pub fn enumerate_elements_capped(k: usize, r: usize, n: usize, cap: usize) -> Result<Vec<MonoidWord>> {
    if r < 2 {
        return invalid("r >= 2");
    }
    if r > 16 {
        return invalid("r <= 16");
    }
    if n > cap || n > MAX_LEN {
        return Err(Error::CapExceeded { what: "enumeration length", requested: n, cap: cap.min(MAX_LEN) });
    }
    let w = column_weights(k, n)?;
    // Columns are filled heaviest first; below[i] = total weight of columns 0..i.
    let mut below = vec![0u64; n + 1];
    for i in 0..n {
        below[i + 1] = below[i] + w[i];
    }
    let mut out = Vec::new();
    let mut rows = vec![0u64; r];
    let mut sums = vec![0u64; r];
    dfs(n, n, &w, &below, &mut rows, &mut sums, &mut out);
    out.sort();
    Ok(out)
}

fn dfs(col: usize, n: usize, w: &[u64], below: &[u64], rows: &mut [u64], sums: &mut [u64], out: &mut Vec<MonoidWord>) {
    let hi = *sums.iter().max().expect("r >= 2");
    let lo = *sums.iter().min().expect("r >= 2");
    if hi - lo > below[col] {
        return;
    }
    if col == 0 {
        if hi == lo {
            out.push(MonoidWord::from_bits(n, rows.to_vec()));
        }
        return;
    }
    let c = col - 1;
    let r = rows.len();
    for choice in 0u32..(1 << r) {
        for j in 0..r {
            if (choice >> j) & 1 == 1 {
                rows[j] |= 1 << c;
                sums[j] += w[c];
            }
        }
        dfs(c, n, w, below, rows, sums, out);
        for j in 0..r {
            if (choice >> j) & 1 == 1 {
                rows[j] &= !(1 << c);
                sums[j] -= w[c];
            }
        }
    }
}

/// The explicit free generators of `M^{(k)}(2)` of length at most `max_len`.
pub fn generators(k: usize, max_len: usize) -> Result<Vec<MonoidWord>> {
    if k < 2 {
        return invalid("k >= 2");
    }
    let mut out = Vec::new();
    if max_len >= 1 {
        out.push(MonoidWord::from_bits(1, vec![0, 0]));
        out.push(MonoidWord::from_bits(1, vec![1, 1]));
    }
    let mut j = 0;
    while (j + 1) * k < max_len.min(MAX_LEN) {
        let len = (j + 1) * k + 1;
        // top row: 1^k, then j blocks of (*, 1^{k-1}), then 0
        let mut top = (1u64 << k) - 1;
        let mut stars = Vec::with_capacity(j);
        for b in 0..j {
            let s = k + b * k;
            stars.push(s);
            top |= ((1u64 << (k - 1)) - 1) << (s + 1);
        }
        let bottom = 1u64 << (len - 1);
        for mask in 0u64..(1 << j) {
            let fill: u64 =
                stars.iter().enumerate().filter(|(b, _)| (mask >> b) & 1 == 1).map(|(_, &s)| 1u64 << s).sum();
            let pi = MonoidWord::from_bits(len, vec![top | fill, bottom | fill]);
            out.push(pi.swap_rows());
            out.push(pi);
        }
        j += 1;
    }
    out.sort_by_key(|w| w.len());
    Ok(out)
}

/// Whether `w` is one of the free generators of `M^{(k)}(2)`.
pub fn is_generator(k: usize, w: &MonoidWord) -> bool {
    if w.arity() != 2 || w.is_empty() || k < 2 {
        return false;
    }
    if w.len() == 1 {
        return w.rows[0] == w.rows[1];
    }
    if w.len() <= k || (w.len() - 1) % k != 0 {
        return false;
    }
    let j = (w.len() - 1) / k - 1;
    let (a, b) = if w.rows[0] & 1 == 1 { (w.rows[0], w.rows[1]) } else { (w.rows[1], w.rows[0]) };
    let star_cols: u64 = (0..j).map(|i| 1u64 << (k + i * k)).sum();
    let stars_a = a & star_cols;
    if stars_a != b & star_cols {
        return false;
    }
    let mut top = (1u64 << k) - 1;
    for i in 0..j {
        top |= ((1u64 << (k - 1)) - 1) << (k + i * k + 1);
    }
    a & !star_cols == top && b & !star_cols == 1u64 << (w.len() - 1)
}

/// `sum t^{N(pi)} x^{len(pi)}` over generators, indexed by length.
pub fn generator_series(k: usize, max_len: usize) -> Result<Vec<TPoly>> {
    let mut s = vec![TPoly::zero(); max_len + 1];
    for g in generators(k, max_len)? {
        s[g.len()] = &s[g.len()] + &TPoly::monomial(BigInt::one(), g.ones() as usize);
    }
    Ok(s)
}

/// The census series agrees with the closed-form generator series.
pub fn check_generator_census(k: usize, max_len: usize) -> Result<bool> {
    let census = generator_series(k, max_len)?;
    let closed = closed_form("gens", &FormParams::k(k))?.series(max_len + 1);
    Ok(census == closed)
}

/// Split `w` into generators by repeatedly taking the shortest balanced prefix.
pub fn free_factorize(k: usize, w: &MonoidWord) -> Result<Vec<MonoidWord>> {
    if w.arity() != 2 {
        return invalid("factorization is defined for two-row words");
    }
    let weights = column_weights(k, w.len())?;
    if !w.is_balanced(&weights) {
        return invalid("word is not in the monoid: row weights differ");
    }
    let mut out = Vec::new();
    let mut start = 0;
    while start < w.len() {
        let end = (start + 1..=w.len())
            .find(|&e| w.slice(start, e).is_balanced(&weights[start..e]))
            .ok_or_else(|| Error::InvariantViolation(format!("no balanced prefix from column {}", start + 1)))?;
        let g = w.slice(start, end);
        if !is_generator(k, &g) {
            return violated(format!("indecomposable factor {:?} is not a listed generator", g.rows()));
        }
        out.push(g);
        start = end;
    }
    Ok(out)
}

/// Number of ways to write `w` as a product of generators.
pub fn count_factorizations(k: usize, w: &MonoidWord) -> usize {
    let n = w.len();
    let mut ways = vec![0usize; n + 1];
    ways[0] = 1;
    for end in 1..=n {
        for start in 0..end {
            if ways[start] > 0 && is_generator(k, &w.slice(start, end)) {
                ways[end] += ways[start];
            }
        }
    }
    ways[n]
}

/// `1 / (1 - G(x))` with `G` taken from the generator census at `t`.
pub fn transfer_series(k: usize, t: &TPoly, n_max: usize) -> Result<Vec<TPoly>> {
    let census = generator_series(k, n_max)?;
    let g: Vec<TPoly> = census.iter().map(|c| compose(c, t)).collect();
    let mut s: Vec<TPoly> = Vec::with_capacity(n_max + 1);
    s.push(TPoly::one());
    for n in 1..=n_max {
        let mut acc = TPoly::zero();
        for l in 1..=n {
            if !g[l].is_zero() {
                acc = &acc + &(&g[l] * &s[n - l]);
            }
        }
        s.push(acc);
    }
    Ok(s)
}

/// `c(t)` with `t` replaced by the polynomial `t`.
pub fn compose(c: &TPoly, t: &TPoly) -> TPoly {
    c.coeffs().iter().rev().fold(TPoly::zero(), |acc, a| &(&acc * t) + &TPoly::constant(a.clone()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferReport {
    pub transfer: Vec<TPoly>,
    pub product: Vec<TPoly>,
    pub closed: Vec<TPoly>,
}

impl TransferReport {
    pub fn agree(&self) -> bool {
        self.transfer == self.product && self.product == self.closed
    }

    /// First `n` where the three series disagree.
    pub fn first_mismatch(&self) -> Option<usize> {
        (0..self.transfer.len()).find(|&n| self.transfer[n] != self.product[n] || self.product[n] != self.closed[n])
    }
}

/// Compare the transfer series with squared-coefficient sums of the
/// product and with the closed form.
pub fn transfer_check(k: usize, t: &TPoly, n_max: usize, limits: &Limits) -> Result<TransferReport> {
    let transfer = transfer_series(k, t, n_max)?;
    let spec = ProductSpec::kbonacci(k, t.clone(), n_max)?;
    let product = corr_series(&spec, &CorrSpec::power(2)?, n_max, limits)?;
    let form = closed_form("vk2n", &FormParams::k(k))?;
    let num = Poly::new(form.num().coeffs().iter().map(|c| compose(c, t)).collect());
    let den = Poly::new(form.den().coeffs().iter().map(|c| compose(c, t)).collect());
    let closed = crate::guess::series_expand(&num, &den, n_max + 1)?;
    Ok(TransferReport { transfer, product, closed })
}

/// Union-find with path halving.
struct Dsu {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
    }
}

/// Largest `n` accepted by [`word_classes`].
pub const WORD_CLASS_CAP: usize = 14;

/// Classes of `{a,b}^n` under `baa <-> abb`. Letter `i` is bit `i`, with
/// `b` as 1.
pub fn word_class_members(n: usize) -> Result<Vec<Vec<u32>>> {
    if n > WORD_CLASS_CAP {
        return Err(Error::CapExceeded { what: "word length", requested: n, cap: WORD_CLASS_CAP });
    }
    let total = 1usize << n;
    let mut dsu = Dsu::new(total);
    for w in 0..total as u32 {
        for p in 0..n.saturating_sub(2) {
            // baa at p, p+1, p+2
            if (w >> p) & 0b111 == 0b001 {
                dsu.union(w, w ^ (0b111 << p));
            }
        }
    }
    let mut classes: HashMap<u32, Vec<u32>> = HashMap::new();
    for w in 0..total as u32 {
        classes.entry(dsu.find(w)).or_default().push(w);
    }
    let mut out: Vec<Vec<u32>> = classes.into_values().collect();
    out.sort();
    Ok(out)
}

/// Sorted multiset of class sizes.
pub fn word_classes(n: usize) -> Result<Vec<u64>> {
    let mut sizes: Vec<u64> = word_class_members(n)?.iter().map(|c| c.len() as u64).collect();
    sizes.sort_unstable();
    Ok(sizes)
}

/// `u*_n(r) = sum of size^r` over classes.
pub fn u_star(n: usize, r: u32) -> Result<BigInt> {
    Ok(word_classes(n)?.into_iter().map(|s| BigInt::from(s).pow(r)).sum())
}

pub fn word_string(w: u32, n: usize) -> String {
    (0..n).map(|i| if (w >> i) & 1 == 1 { 'b' } else { 'a' }).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightMode {
    /// Position `i` (0-based) weighs `F_{i+2}`.
    Fibonacci,
    /// Position `i` weighs `phi^i`.
    PhiPowers,
}

/// One rewrite of three consecutive positions starting at `start` (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Move {
    pub start: usize,
    /// `001 -> 110` when true, `110 -> 001` otherwise.
    pub forward: bool,
}

/// Longest binary word considered by [`move_connectivity`].
pub const MOVE_LEN_CAP: usize = 80;

fn ones_at(bits: &[u8]) -> Result<Vec<u8>> {
    if bits.iter().any(|&b| b > 1) {
        return invalid("entries must be 0/1");
    }
    Ok(bits.to_vec())
}

/// A shortest sequence of `001 <-> 110` moves turning `alpha` into
/// `beta`. Unequal sums are an argument error; equal sums with no path
/// mean the move graph is disconnected and are reported as a violation.
pub fn move_connectivity(alpha: &[u8], beta: &[u8], mode: WeightMode) -> Result<Vec<Move>> {
    let (a, b) = (ones_at(alpha)?, ones_at(beta)?);
    let top = |v: &[u8]| v.iter().rposition(|&x| x == 1).map_or(0, |p| p + 1);
    let fib_sum =
        |v: &[u8]| -> Result<u128> { v.iter().enumerate().filter(|(_, &x)| x == 1).map(|(i, _)| fib_weight(i)).sum() };
    // a word of this value has no 1 at or beyond `limit`
    let limit = match mode {
        WeightMode::Fibonacci => {
            let (sa, sb) = (fib_sum(&a)?, fib_sum(&b)?);
            if sa != sb {
                return invalid(format!("sums differ: {sa} vs {sb}"));
            }
            (0..).find(|&i| fib_weight(i).map_or(true, |w| w > sa)).unwrap_or(MOVE_LEN_CAP)
        }
        WeightMode::PhiPowers => {
            let (sa, sb) = (phi_power_reduce(&a), phi_power_reduce(&b));
            if sa != sb {
                return invalid("sums differ");
            }
            let phi = crate::sequences::GoldenInt::phi();
            let mut p = crate::sequences::GoldenInt::one();
            let mut i = 0;
            while p <= sa && i <= MOVE_LEN_CAP {
                p = &p * &phi;
                i += 1;
            }
            i
        }
    };
    let len = limit.max(top(&a)).max(top(&b));
    if len > MOVE_LEN_CAP {
        return invalid(format!("words longer than {MOVE_LEN_CAP} positions are not searched"));
    }
    let pad = |v: &[u8]| {
        let mut w = v[..top(v)].to_vec();
        w.resize(len, 0);
        w
    };
    let (start, goal) = (pad(&a), pad(&b));
    let mut prev: HashMap<Vec<u8>, Option<(Vec<u8>, Move)>> = HashMap::new();
    prev.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        if cur == goal {
            let mut path = Vec::new();
            let mut at = cur;
            while let Some(Some((p, m))) = prev.get(&at) {
                path.push(*m);
                at = p.clone();
            }
            path.reverse();
            return Ok(path);
        }
        for s in 0..len.saturating_sub(2) {
            let tri = [cur[s], cur[s + 1], cur[s + 2]];
            let (next, forward) = match tri {
                [0, 0, 1] => ([1, 1, 0], true),
                [1, 1, 0] => ([0, 0, 1], false),
                _ => continue,
            };
            let mut w = cur.clone();
            w[s..s + 3].copy_from_slice(&next);
            if !prev.contains_key(&w) {
                prev.insert(w.clone(), Some((cur.clone(), Move { start: s, forward })));
                queue.push_back(w);
            }
        }
    }
    violated("equal sums but no connecting sequence of moves")
}

fn fib_weight(i: usize) -> Result<u128> {
    if i + 2 > 93 {
        return invalid("Fibonacci weight exceeds 64 bits");
    }
    Ok(fib(i + 2) as u128)
}

/// Apply moves to `bits`, extending with zeros as needed.
pub fn apply_moves(bits: &[u8], moves: &[Move]) -> Result<Vec<u8>> {
    let mut w = bits.to_vec();
    for m in moves {
        if w.len() < m.start + 3 {
            w.resize(m.start + 3, 0);
        }
        let (from, to) = if m.forward { ([0, 0, 1], [1, 1, 0]) } else { ([1, 1, 0], [0, 0, 1]) };
        if w[m.start..m.start + 3] != from {
            return invalid(format!("move at {} does not apply", m.start));
        }
        w[m.start..m.start + 3].copy_from_slice(&to);
    }
    Ok(w)
}
