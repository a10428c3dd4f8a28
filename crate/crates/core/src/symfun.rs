//! Truncated symmetric functions in the monomial, power-sum and forgotten
//! bases, for the rank-generating products of the posets `P_{ib}`.
//!
//! Transition matrices are exact: `p_lambda` is expanded by brute force in
//! `n` variables and monomial orbits are read off.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{invalid, violated, Result};

/// Weakly decreasing positive parts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return invalid("partition parts must be positive");
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self(parts))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `z_lambda = prod i^{m_i} m_i!`.
    pub fn z(&self) -> BigInt {
        let mut mult: BTreeMap<u32, u32> = BTreeMap::new();
        for &p in &self.0 {
            *mult.entry(p).or_default() += 1;
        }
        mult.iter().fold(BigInt::one(), |acc, (&i, &m)| {
            let fact: BigInt = (1..=m).map(BigInt::from).product();
            acc * BigInt::from(i).pow(m) * fact
        })
    }

    /// `(-1)^{|lambda| - len(lambda)}`, the sign of `omega` on `p_lambda`.
    pub fn omega_sign(&self) -> i32 {
        if (self.weight() as usize - self.len()) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `b^j 1^{n - jb}`, or `None` if `jb > n`.
    pub fn block(b: u32, j: u32, n: u32) -> Option<Self> {
        let used = b.checked_mul(j)?;
        if used > n {
            return None;
        }
        let mut parts = vec![b; j as usize];
        parts.extend(std::iter::repeat_n(1, (n - used) as usize));
        Some(Self(parts))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// All partitions of `n`, largest first part first.
pub fn partitions(n: u32) -> Vec<Partition> {
    fn go(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=rem.min(max)).rev() {
            cur.push(p);
            go(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Monomial,
    PowerSum,
    /// `fo_lambda = omega m_lambda`.
    Forgotten,
}

impl Basis {
    fn symbol(self) -> &'static str {
        match self {
            Basis::Monomial => "m",
            Basis::PowerSum => "p",
            Basis::Forgotten => "fo",
        }
    }
}

/// Symmetric function truncated at degree `cap`.
#[derive(Clone, PartialEq)]
pub struct SymExpansion {
    pub basis: Basis,
    pub cap: u32,
    coeffs: BTreeMap<Partition, BigRational>,
}

impl SymExpansion {
    pub fn new(basis: Basis, cap: u32) -> Self {
        Self { basis, cap, coeffs: BTreeMap::new() }
    }

    pub fn coeff(&self, l: &Partition) -> BigRational {
        self.coeffs.get(l).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn set(&mut self, l: Partition, c: BigRational) -> Result<()> {
        if l.weight() > self.cap {
            return invalid(format!("partition {l:?} exceeds the degree cap {}", self.cap));
        }
        if c.is_zero() {
            self.coeffs.remove(&l);
        } else {
            self.coeffs.insert(l, c);
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &BigRational)> {
        self.coeffs.iter()
    }

    /// Homogeneous part of degree `n` as coefficients over `partitions(n)`.
    fn degree_vector(&self, n: u32, parts: &[Partition]) -> Vec<BigRational> {
        debug_assert!(n <= self.cap);
        parts.iter().map(|l| self.coeff(l)).collect()
    }

    fn from_vectors(basis: Basis, cap: u32, tables: &SymTables, vecs: &[Vec<BigRational>]) -> Self {
        let mut out = Self::new(basis, cap);
        for (n, v) in vecs.iter().enumerate() {
            for (l, c) in tables.parts[n].iter().zip(v) {
                if !c.is_zero() {
                    out.coeffs.insert(l.clone(), c.clone());
                }
            }
        }
        out
    }

    fn signed(&self) -> Self {
        let mut out = self.clone();
        for (l, c) in out.coeffs.iter_mut() {
            if l.omega_sign() < 0 {
                *c = -c.clone();
            }
        }
        out
    }

    /// Rewrite in `target`, exactly.
    pub fn to_basis(&self, target: Basis, tables: &SymTables) -> Result<Self> {
        if self.cap > tables.cap {
            return invalid(format!("tables built to degree {}, expansion needs {}", tables.cap, self.cap));
        }
        if self.basis == target {
            return Ok(self.clone());
        }
        let conv = |from: &Self, m_to_p: bool| -> Self {
            let vecs: Vec<Vec<BigRational>> = (0..=self.cap)
                .map(|n| {
                    let v = from.degree_vector(n, &tables.parts[n as usize]);
                    let mat = if m_to_p { &tables.m_to_p[n as usize] } else { &tables.p_to_m[n as usize] };
                    mat_vec(mat, &v)
                })
                .collect();
            Self::from_vectors(if m_to_p { Basis::PowerSum } else { Basis::Monomial }, self.cap, tables, &vecs)
        };
        let relabel = |e: &Self, b: Basis| Self { basis: b, ..e.clone() };
        Ok(match (self.basis, target) {
            (Basis::Monomial, Basis::PowerSum) => conv(self, true),
            (Basis::PowerSum, Basis::Monomial) => conv(self, false),
            // sum c fo = omega(sum c m)
            (Basis::Forgotten, Basis::PowerSum) => conv(&relabel(self, Basis::Monomial), true).signed(),
            (Basis::PowerSum, Basis::Forgotten) => relabel(&conv(&self.signed(), false), Basis::Forgotten),
            (Basis::Monomial, Basis::Forgotten) | (Basis::Forgotten, Basis::Monomial) => {
                self.to_basis(Basis::PowerSum, tables)?.to_basis(target, tables)?
            }
            _ => unreachable!("equal bases handled above"),
        })
    }

    /// `omega`, computed through the power-sum basis and returned in `self.basis`.
    pub fn omega(&self, tables: &SymTables) -> Result<Self> {
        self.to_basis(Basis::PowerSum, tables)?.signed().to_basis(self.basis, tables)
    }
}

impl fmt::Display for SymExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let s = self.basis.symbol();
        let terms: Vec<String> = self.coeffs.iter().map(|(l, c)| format!("{c} · {s}{:?}", l.0)).collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Debug for SymExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn mat_vec(m: &[Vec<BigRational>], v: &[BigRational]) -> Vec<BigRational> {
    m.iter().map(|row| row.iter().zip(v).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum()).collect()
}

/// Per-degree partition lists and transition matrices.
pub struct SymTables {
    pub cap: u32,
    parts: Vec<Vec<Partition>>,
    /// `p_to_m[n][mu][lambda]` = coefficient of `m_mu` in `p_lambda`.
    p_to_m: Vec<Vec<Vec<BigRational>>>,
    m_to_p: Vec<Vec<Vec<BigRational>>>,
}

/// Largest degree for transition tables.
pub const TABLE_CAP: u32 = 10;

impl SymTables {
    pub fn new(cap: u32) -> Result<Self> {
        if cap > TABLE_CAP {
            return invalid(format!("transition tables are built to degree {TABLE_CAP}"));
        }
        let mut parts = Vec::new();
        let mut p_to_m = Vec::new();
        let mut m_to_p = Vec::new();
        for n in 0..=cap {
            let ps = partitions(n);
            let idx: HashMap<&Partition, usize> = ps.iter().enumerate().map(|(i, p)| (p, i)).collect();
            let mut mat = vec![vec![BigRational::zero(); ps.len()]; ps.len()];
            for (col, l) in ps.iter().enumerate() {
                for (mu, c) in powersum_orbits(l, n as usize) {
                    mat[idx[&mu]][col] = BigRational::from_integer(c);
                }
            }
            let inv = invert(&mat)?;
            parts.push(ps);
            p_to_m.push(mat);
            m_to_p.push(inv);
        }
        Ok(Self { cap, parts, p_to_m, m_to_p })
    }

    pub fn partitions(&self, n: u32) -> &[Partition] {
        &self.parts[n as usize]
    }
}

/// Coefficients of the monomial orbits in `p_lambda`, by expanding the
/// product of power sums in `vars` variables.
fn powersum_orbits(l: &Partition, vars: usize) -> Vec<(Partition, BigInt)> {
    let mut poly: HashMap<Vec<u8>, BigInt> = HashMap::from([(vec![0u8; vars], BigInt::one())]);
    for &k in l.parts() {
        let mut next: HashMap<Vec<u8>, BigInt> = HashMap::new();
        for (mono, c) in &poly {
            for v in 0..vars {
                let mut m = mono.clone();
                m[v] += k as u8;
                *next.entry(m).or_insert_with(BigInt::zero) += c;
            }
        }
        poly = next;
    }
    // one representative per orbit: exponents weakly decreasing
    poly.into_iter()
        .filter(|(m, _)| m.windows(2).all(|w| w[0] >= w[1]))
        .map(|(m, c)| (Partition(m.into_iter().filter(|&e| e > 0).map(u32::from).collect()), c))
        .collect()
}

fn invert(m: &[Vec<BigRational>]) -> Result<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return violated("singular transition matrix");
        };
        a.swap(c, p);
        let inv = a[c][c].recip();
        for v in a[c].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let pivot = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot) {
                    *x = &*x - &(&f * y);
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// How `q~` is seeded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedConvention {
    /// Genuine power sums of the reciprocal roots: `q~_b = i^b - b(i-1)`.
    PowerSum,
    /// `q~_0 = 1` inside the recurrence, so `q~_b = i^b - (i-1)`.
    ZeroSeed,
}

fn check_ib(i: u32, b: u32) -> Result<()> {
    if i < 1 || b < 2 {
        return invalid("need i >= 1 and b >= 2");
    }
    Ok(())
}

/// `q~_1..=q~_n` under `conv`.
pub fn tilde_q_seq(i: u32, b: u32, n: usize, conv: SeedConvention) -> Result<Vec<BigInt>> {
    check_ib(i, b)?;
    let ib = BigInt::from(i);
    let im1 = BigInt::from(i) - 1;
    let b = b as usize;
    // index 0 holds q~_0 under the zero-seed convention
    let mut q: Vec<BigInt> = vec![BigInt::one()];
    for k in 1..=n {
        let v = if k < b {
            ib.pow(k as u32)
        } else if k == b && conv == SeedConvention::PowerSum {
            ib.pow(k as u32) - BigInt::from(b) * &im1
        } else {
            &ib * &q[k - 1] - &im1 * &q[k - b]
        };
        q.push(v);
    }
    q.remove(0);
    Ok(q)
}

/// `q~_n`, the `n`-th power sum of the reciprocal roots of `1 - ix + (i-1)x^b`.
pub fn tilde_q(i: u32, b: u32, n: usize) -> Result<BigInt> {
    if n == 0 {
        return invalid("n >= 1");
    }
    Ok(tilde_q_seq(i, b, n, SeedConvention::PowerSum)?.pop().expect("n >= 1"))
}

/// Rank sizes `q_0..=q_n` of `P_{ib}`: coefficients of `1 / (1 - ix + (i-1)x^b)`.
pub fn rank_sizes(i: u32, b: u32, n: usize) -> Result<Vec<BigInt>> {
    check_ib(i, b)?;
    let (ib, im1) = (BigInt::from(i), BigInt::from(i) - 1);
    let mut q = vec![BigInt::one()];
    for k in 1..=n {
        let mut v = &ib * &q[k - 1];
        if k >= b as usize {
            v -= &im1 * &q[k - b as usize];
        }
        q.push(v);
    }
    Ok(q)
}

/// Largest degree for [`ep_monomial`].
pub const EP_CAP: u32 = 10;
/// Largest degree for the expansion checks.
pub const VERIFY_CAP: u32 = 8;

/// `E_{P_{ib}}` in the monomial basis to degree `d`: `m_lambda` has
/// coefficient `prod q_{lambda_j}`. Cross-checked against the product
/// `prod_{m <= d} Phi(x_m)` expanded in `d` variables.
pub fn ep_monomial(i: u32, b: u32, d: u32) -> Result<SymExpansion> {
    if d > EP_CAP {
        return invalid(format!("ep_monomial is computed to degree {EP_CAP}"));
    }
    let q = rank_sizes(i, b, d as usize)?;
    let mut out = SymExpansion::new(Basis::Monomial, d);
    for n in 0..=d {
        for l in partitions(n) {
            let c: BigInt = l.parts().iter().map(|&p| q[p as usize].clone()).product();
            out.set(l, BigRational::from_integer(c))?;
        }
    }
    let brute = product_orbits(&q, d as usize);
    for n in 0..=d {
        for l in partitions(n) {
            let want = brute.get(&l).cloned().unwrap_or_else(BigInt::zero);
            if out.coeff(&l) != BigRational::from_integer(want.clone()) {
                return violated(format!(
                    "coefficient of m{:?}: product gives {want}, rank formula {}",
                    l,
                    out.coeff(&l)
                ));
            }
        }
    }
    Ok(out)
}

/// Orbit coefficients of `prod_{m < vars} sum_k q_k x_m^k`, truncated at degree `vars`.
fn product_orbits(q: &[BigInt], vars: usize) -> HashMap<Partition, BigInt> {
    let mut poly: HashMap<Vec<u8>, BigInt> = HashMap::from([(vec![0u8; vars], BigInt::one())]);
    for v in 0..vars {
        let mut next: HashMap<Vec<u8>, BigInt> = HashMap::new();
        for (mono, c) in &poly {
            let deg: usize = mono.iter().map(|&e| e as usize).sum();
            for (k, qk) in q.iter().enumerate().take(vars - deg + 1) {
                let mut m = mono.clone();
                m[v] = k as u8;
                *next.entry(m).or_insert_with(BigInt::zero) += c * qk;
            }
        }
        poly = next;
    }
    poly.into_iter()
        .filter(|(m, _)| m.windows(2).all(|w| w[0] >= w[1]))
        .map(|(m, c)| (Partition(m.into_iter().filter(|&e| e > 0).map(u32::from).collect()), c))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    pub partition: Partition,
    pub expected: BigRational,
    pub actual: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionReport {
    pub i: u32,
    pub b: u32,
    pub degree: u32,
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl ExpansionReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn check_degree(d: u32) -> Result<()> {
    if d > VERIFY_CAP {
        return invalid(format!("expansion checks run to degree {VERIFY_CAP}"));
    }
    Ok(())
}

/// Compare the power-sum coefficients of `E_{P_{ib}}` with
/// `z_lambda^{-1} prod q~_{lambda_j}` under `conv`.
pub fn verify_powersum_expansion_with(i: u32, b: u32, d: u32, conv: SeedConvention) -> Result<ExpansionReport> {
    check_degree(d)?;
    let tables = SymTables::new(d)?;
    let p = ep_monomial(i, b, d)?.to_basis(Basis::PowerSum, &tables)?;
    let qt = tilde_q_seq(i, b, d.max(1) as usize, conv)?;
    let mut report = ExpansionReport { i, b, degree: d, checked: 0, mismatches: Vec::new() };
    for n in 0..=d {
        for l in tables.partitions(n) {
            let num: BigInt = l.parts().iter().map(|&k| qt[k as usize - 1].clone()).product();
            let expected = BigRational::new(num, l.z());
            let actual = p.coeff(l);
            report.checked += 1;
            if expected != actual {
                report.mismatches.push(Mismatch { partition: l.clone(), expected, actual });
            }
        }
    }
    Ok(report)
}

pub fn verify_powersum_expansion(i: u32, b: u32, d: u32) -> Result<ExpansionReport> {
    verify_powersum_expansion_with(i, b, d, SeedConvention::PowerSum)
}

/// The forgotten-basis coefficients: `(-1)^{jb}(i-1)^j i^{n-jb}` on
/// `b^j 1^{n-jb}` and zero elsewhere.
pub fn verify_forgotten_expansion(i: u32, b: u32, d: u32) -> Result<ExpansionReport> {
    check_degree(d)?;
    check_ib(i, b)?;
    let tables = SymTables::new(d)?;
    let fo = ep_monomial(i, b, d)?.to_basis(Basis::Forgotten, &tables)?;
    let mut report = ExpansionReport { i, b, degree: d, checked: 0, mismatches: Vec::new() };
    for n in 0..=d {
        let mut expected: HashMap<Partition, BigInt> = HashMap::new();
        for j in 0..=n / b {
            let l = Partition::block(b, j, n).expect("jb <= n");
            let sign: i32 = if (j * b) % 2 == 0 { 1 } else { -1 };
            let c = BigInt::from(sign) * (BigInt::from(i) - 1u32).pow(j) * BigInt::from(i).pow(n - j * b);
            expected.insert(l, c);
        }
        for l in tables.partitions(n) {
            let e = BigRational::from_integer(expected.get(l).cloned().unwrap_or_else(BigInt::zero));
            let actual = fo.coeff(l);
            report.checked += 1;
            if e != actual {
                report.mismatches.push(Mismatch { partition: l.clone(), expected: e, actual });
            }
        }
    }
    Ok(report)
}

/// Absolute value of the largest numerator among coefficients, for display.
pub fn max_abs_coeff(e: &SymExpansion) -> BigInt {
    e.terms().map(|(_, c)| c.numer().abs()).max().unwrap_or_else(BigInt::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn part(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    /// Power sums from the coefficients of `1 - ix + (i-1)x^b` by Newton's identities.
    fn newton(i: i64, b: usize, n: usize) -> Vec<i64> {
        // prod (1 - a x) = sum (-1)^k e_k x^k
        let mut e = vec![0i64; n + 1];
        e[1] += i;
        if b <= n {
            e[b] += if b % 2 == 0 { i - 1 } else { -(i - 1) };
        }
        let mut p = vec![0i64; n + 1];
        for k in 1..=n {
            let mut s = if k % 2 == 1 { k as i64 * e[k] } else { -(k as i64) * e[k] };
            for j in 1..k {
                let sign = if j % 2 == 1 { 1 } else { -1 };
                s += sign * e[j] * p[k - j];
            }
            p[k] = s;
        }
        p[1..].to_vec()
    }

    #[test]
    fn partitions_and_z() {
        assert_eq!(partitions(4).len(), 5);
        assert_eq!(partitions(10).len(), 42);
        assert_eq!(part(&[2, 1, 1]).z(), BigInt::from(4));
        assert_eq!(Partition::empty().z(), BigInt::one());
        assert_eq!(Partition::block(3, 1, 5), Some(part(&[3, 1, 1])));
        assert_eq!(Partition::block(3, 2, 5), None);
    }

    #[test]
    fn tilde_q_values() {
        let v: Vec<i64> = (1..=6).map(|n| i64::try_from(tilde_q(2, 3, n).unwrap()).unwrap()).collect();
        assert_eq!(v, [2, 4, 5, 8, 12, 19]);
        assert!((1..=10).all(|n| tilde_q(2, 2, n).unwrap() == BigInt::from(2)));
        for (i, b) in [(2u32, 2u32), (2, 3), (3, 2), (3, 3), (4, 5)] {
            assert_eq!(tilde_q(i, b, b as usize - 1).unwrap(), BigInt::from(i).pow(b - 1));
            let want = newton(i as i64, b as usize, 12);
            let got: Vec<i64> = tilde_q_seq(i, b, 12, SeedConvention::PowerSum)
                .unwrap()
                .iter()
                .map(|x| i64::try_from(x).unwrap())
                .collect();
            assert_eq!(got, want, "(i, b) = ({i}, {b})");
        }
        let zero = tilde_q_seq(2, 3, 3, SeedConvention::ZeroSeed).unwrap();
        assert_eq!(zero[2], BigInt::from(7));
    }

    #[test]
    fn ep_coefficients() {
        let e = ep_monomial(2, 3, 6).unwrap();
        assert_eq!(e.coeff(&part(&[1])), r(2));
        assert_eq!(e.coeff(&Partition::empty()), r(1));
        assert_eq!(e.coeff(&part(&[2, 1])), r(8));
        for l in partitions(5) {
            let single: BigRational = l.parts().iter().map(|&p| e.coeff(&part(&[p]))).product();
            assert_eq!(e.coeff(&l), single);
        }
        assert!(ep_monomial(2, 2, 10).is_ok());
        assert!(ep_monomial(2, 2, 11).is_err());
    }

    #[test]
    fn powersum_expansion() {
        for (i, b) in [(2, 3), (2, 2), (3, 2), (3, 3)] {
            let rep = verify_powersum_expansion(i, b, 6).unwrap();
            assert!(rep.passed(), "{rep:?}");
        }
        let tables = SymTables::new(1).unwrap();
        let p = ep_monomial(3, 2, 1).unwrap().to_basis(Basis::PowerSum, &tables).unwrap();
        assert_eq!(p.coeff(&part(&[1])), r(3));
        // the zero seed differs at degree b
        let rep = verify_powersum_expansion_with(2, 3, 6, SeedConvention::ZeroSeed).unwrap();
        assert!(!rep.passed());
        assert_eq!(rep.mismatches[0].partition.weight(), 3);
    }

    #[test]
    fn forgotten_expansion() {
        for (i, b) in [(2, 3), (2, 2), (3, 2), (3, 4)] {
            let rep = verify_forgotten_expansion(i, b, 6).unwrap();
            assert!(rep.passed(), "{rep:?}");
        }
        let tables = SymTables::new(5).unwrap();
        let fo = ep_monomial(2, 3, 5).unwrap().to_basis(Basis::Forgotten, &tables).unwrap();
        assert_eq!(fo.coeff(&part(&[3, 1, 1])), r(-4));
        assert_eq!(fo.coeff(&part(&[1, 1, 1, 1])), r(16));
        assert_eq!(fo.coeff(&part(&[2, 2])), r(0));
    }

    #[test]
    fn display() {
        let e = ep_monomial(2, 3, 1).unwrap();
        assert_eq!(e.to_string(), "1 · m[] + 2 · m[1]");
    }

    proptest! {
        #[test]
        fn round_trips_and_involution(
            entries in proptest::collection::vec((0usize..22, -9i64..=9), 0..8),
            basis in 0usize..3,
        ) {
            let tables = SymTables::new(6).unwrap();
            let all: Vec<Partition> = (0..=6u32).flat_map(partitions).collect();
            let b = [Basis::Monomial, Basis::PowerSum, Basis::Forgotten][basis];
            let mut e = SymExpansion::new(b, 6);
            for (idx, c) in entries {
                let l = all[idx % all.len()].clone();
                let prev = e.coeff(&l);
                e.set(l, prev + r(c)).unwrap();
            }
            for target in [Basis::Monomial, Basis::PowerSum, Basis::Forgotten] {
                let there = e.to_basis(target, &tables).unwrap();
                prop_assert_eq!(&there.to_basis(b, &tables).unwrap(), &e);
            }
            prop_assert_eq!(e.omega(&tables).unwrap().omega(&tables).unwrap(), e.clone());
        }
    }
}
