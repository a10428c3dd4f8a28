//! Coefficient statistics: correlation power sums, congruence class
//! counts, and coefficient-value predicates.

use std::any::Any;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::polynomials::{build_product_with, Coef, CoeffPoly, Limits, ProductSpec};
use crate::ring::TPoly;

/// Exponent pattern `alpha = (alpha_0..alpha_{m-1})` of the window product
/// `sum_k prod_j c(k+j)^{alpha_j}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CorrSpec {
    alpha: Vec<u32>,
}

impl CorrSpec {
    pub fn new(alpha: Vec<u32>) -> Result<Self> {
        if alpha.is_empty() {
            return invalid("alpha must be nonempty");
        }
        if alpha.iter().all(|&a| a == 0) {
            return invalid("alpha needs a positive entry, otherwise the sum diverges");
        }
        Ok(Self { alpha })
    }

    /// `alpha = (r)`: the sum of `r`-th powers.
    pub fn power(r: u32) -> Result<Self> {
        Self::new(vec![r])
    }

    pub fn alpha(&self) -> &[u32] {
        &self.alpha
    }

    pub fn width(&self) -> usize {
        self.alpha.len()
    }

    /// Window starts that can contribute for a polynomial supported on `[base, deg]`.
    fn starts(&self, base: u64, deg: u64) -> std::ops::RangeInclusive<u64> {
        // A start below 0 is excluded; one above deg meets a zero at every
        // positive exponent.
        let first_pos = self.alpha.iter().position(|&a| a > 0).expect("validated") as u64;
        base.saturating_sub(first_pos)..=deg
    }
}

/// `sum_{k >= 0} prod_j c(k+j)^{alpha_j}` over `Z[t]`.
pub fn corr_sum<C: Coef>(p: &CoeffPoly<C>, spec: &CorrSpec) -> Result<TPoly> {
    if p.is_zero() {
        return Ok(TPoly::zero());
    }
    let any = p as &dyn Any;
    if let Some(ints) = any.downcast_ref::<CoeffPoly<i64>>() {
        if let Some(v) = corr_sum_i64(ints, spec) {
            return Ok(TPoly::constant(v));
        }
        return Ok(TPoly::constant(corr_sum_big(&ints.to_bigint_coeffs()?, spec)));
    }
    if let Some(big) = any.downcast_ref::<CoeffPoly<BigInt>>() {
        return Ok(TPoly::constant(corr_sum_big(big, spec)));
    }
    let sym = p.to_tpoly_coeffs();
    match sym.to_bigint_coeffs() {
        Ok(b) => Ok(TPoly::constant(corr_sum_big(&b, spec))),
        Err(_) => Ok(corr_sum_generic(&sym, spec)),
    }
}

/// Machine-integer path: `i128` accumulation, `None` on overflow.
fn corr_sum_i64(p: &CoeffPoly<i64>, spec: &CorrSpec) -> Option<BigInt> {
    let alpha = spec.alpha();
    let base = p.base();
    let deg = p.degree();
    let get = |e: u64| -> i128 { p.coeff(e) as i128 };
    let mut acc: i128 = 0;
    if let (Some(v), [r]) = (p.dense(), alpha) {
        for &c in v {
            acc = acc.checked_add(pow_i128(c as i128, *r)?)?;
        }
        return Some(BigInt::from(acc));
    }
    for k in spec.starts(base, deg) {
        let mut prod: i128 = 1;
        for (j, &a) in alpha.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let c = get(k + j as u64);
            if c == 0 {
                prod = 0;
                break;
            }
            prod = prod.checked_mul(pow_i128(c, a)?)?;
        }
        acc = acc.checked_add(prod)?;
    }
    Some(BigInt::from(acc))
}

#[inline]
fn pow_i128(c: i128, r: u32) -> Option<i128> {
    c.checked_pow(r)
}

fn corr_sum_big(p: &CoeffPoly<BigInt>, spec: &CorrSpec) -> BigInt {
    let alpha = spec.alpha();
    let mut acc = BigInt::zero();
    for k in spec.starts(p.base(), p.degree()) {
        let mut prod = BigInt::one();
        for (j, &a) in alpha.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let c = p.coeff(k + j as u64);
            if c.is_zero() {
                prod = BigInt::zero();
                break;
            }
            prod *= num_traits::pow(c, a as usize);
        }
        acc += prod;
    }
    acc
}

fn corr_sum_generic(p: &CoeffPoly<TPoly>, spec: &CorrSpec) -> TPoly {
    let alpha = spec.alpha();
    let mut acc = TPoly::zero();
    for k in spec.starts(p.base(), p.degree()) {
        let mut prod = TPoly::one();
        for (j, &a) in alpha.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let c = p.coeff(k + j as u64);
            if c.is_zero() {
                prod = TPoly::zero();
                break;
            }
            prod = &prod * &c.pow(a);
        }
        acc = &acc + &prod;
    }
    acc
}

/// `v(n)` for `n = 0..=n_max`, one value per partial product.
pub fn corr_series(spec: &ProductSpec, alpha: &CorrSpec, n_max: usize, limits: &Limits) -> Result<Vec<TPoly>> {
    let mut out = corr_series_multi(spec, std::slice::from_ref(alpha), n_max, limits)?;
    Ok(out.pop().expect("one series per alpha"))
}

/// Several correlation series from a single streamed product.
pub fn corr_series_multi(
    spec: &ProductSpec,
    alphas: &[CorrSpec],
    n_max: usize,
    limits: &Limits,
) -> Result<Vec<Vec<TPoly>>> {
    let spec = spec.clone().with_n(n_max);
    if spec.is_symbolic() {
        return stream_corr::<TPoly>(&spec, alphas, limits);
    }
    match stream_corr::<i64>(&spec, alphas, limits) {
        Err(Error::Overflow(_)) => stream_corr::<BigInt>(&spec, alphas, limits),
        other => other,
    }
}

fn stream_corr<C: Coef>(spec: &ProductSpec, alphas: &[CorrSpec], limits: &Limits) -> Result<Vec<Vec<TPoly>>> {
    let mut out = vec![Vec::with_capacity(spec.n + 1); alphas.len()];
    build_product_with::<C>(spec, limits, |_, p| {
        for (series, a) in out.iter_mut().zip(alphas) {
            series.push(corr_sum(p, a)?);
        }
        Ok(())
    })?;
    Ok(out)
}

/// Integer values of a series that must not depend on `t`.
pub fn integer_values(series: &[TPoly]) -> Result<Vec<BigInt>> {
    series
        .iter()
        .enumerate()
        .map(|(n, v)| v.as_integer().ok_or_else(|| Error::InvalidArgument(format!("term {n} is symbolic"))))
        .collect()
}

/// Number of `k` in `[0, deg p]` with `c(k) = a (mod m)`.
pub fn residue_count<C: Coef>(p: &CoeffPoly<C>, m: u64, a: u64) -> Result<u64> {
    if m < 2 || a >= m {
        return invalid(format!("need m >= 2 and 0 <= a < m, got m={m}, a={a}"));
    }
    let b = p.to_bigint_coeffs()?;
    let mb = BigInt::from(m);
    let ab = BigInt::from(a);
    let deg = if p.is_zero() { 0 } else { p.degree() };
    let mut count = 0;
    let mut nonzero = 0u64;
    for (_, c) in b.nonzero_terms() {
        nonzero += 1;
        if c.mod_floor(&mb) == ab {
            count += 1;
        }
    }
    if a == 0 {
        count += deg + 1 - nonzero;
    }
    Ok(count)
}

/// Residue histograms `h(n)[a] = #{k <= deg : c(k) = a mod m}` for
/// `n = 0..=n_max`, computed on residues only.
pub fn residue_series(spec: &ProductSpec, m: u64, n_max: usize, limits: &Limits) -> Result<Vec<Vec<u64>>> {
    if !(2..=255).contains(&m) {
        return invalid(format!("modulus {m} outside 2..=255"));
    }
    if spec.is_symbolic() {
        return invalid("congruence counts need an integer specialization of t");
    }
    let spec = spec.clone().with_n(n_max);
    let red = |t: &TPoly| -> u32 {
        let v = t.as_integer().expect("integer spec");
        v.mod_floor(&BigInt::from(m)).to_u32().expect("below modulus")
    };
    let mut v: Vec<u8> = vec![0; (spec.prefactor.degree() + 1) as usize];
    for (e, c) in spec.prefactor.nonzero_terms() {
        v[e as usize] = red(c) as u8;
    }
    let hist = |v: &[u8]| -> Vec<u64> {
        let mut h = vec![0u64; m as usize];
        for &x in v {
            h[x as usize] += 1;
        }
        h
    };
    let mut out = vec![hist(&v)];
    for i in 1..=spec.n {
        let terms: Vec<(usize, u32)> =
            spec.factor_terms(i)?.into_iter().map(|(e, a)| (e as usize, red(&a))).filter(|&(_, a)| a != 0).collect();
        let old_len = v.len();
        let emax = terms.iter().map(|t| t.0).max().unwrap_or(0);
        limits.check(i, (old_len + emax) as u64, 1)?;
        v.resize(old_len + emax, 0);
        let m32 = m as u32;
        for k in (1..v.len()).rev() {
            let mut acc = v[k] as u32;
            for &(e, a) in &terms {
                if k >= e && k - e < old_len {
                    acc += a * v[k - e] as u32;
                }
            }
            v[k] = (acc % m32) as u8;
        }
        out.push(hist(&v));
    }
    Ok(out)
}

/// Collapse histograms modulo `big` to modulo `m`, which must divide `big`.
pub fn fold_residues(hist: &[u64], m: u64) -> Result<Vec<u64>> {
    let big = hist.len() as u64;
    if m == 0 || big % m != 0 {
        return invalid(format!("{m} does not divide {big}"));
    }
    let mut out = vec![0; m as usize];
    for (r, &c) in hist.iter().enumerate() {
        out[r % m as usize] += c;
    }
    Ok(out)
}

/// Whether every nonzero coefficient lies in `allowed`.
pub fn coefficient_value_predicate<C: Coef>(p: &CoeffPoly<C>, allowed: &BTreeSet<BigInt>) -> Result<bool> {
    let b = p.to_bigint_coeffs()?;
    Ok(b.nonzero_terms().into_iter().all(|(_, c)| allowed.contains(c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomials::{build_product, CoeffPoly};
    use crate::sequences::RecurrentSeq;
    use proptest::prelude::*;

    fn lim() -> Limits {
        Limits { max_terms: 50_000_000, max_bytes: 1 << 31 }
    }

    fn fibp(n: usize) -> CoeffPoly<i64> {
        build_product(&ProductSpec::fibonacci(n), &lim()).unwrap()
    }

    fn int(x: i64) -> TPoly {
        TPoly::constant(BigInt::from(x))
    }

    #[test]
    fn corr_examples() {
        let sq = CorrSpec::power(2).unwrap();
        assert_eq!(corr_sum(&fibp(3), &sq).unwrap(), int(10));
        assert_eq!(corr_sum(&fibp(0), &sq).unwrap(), int(1));
        assert_eq!(corr_sum(&fibp(4), &sq).unwrap(), int(24));
        assert_eq!(corr_sum(&fibp(1), &CorrSpec::new(vec![1, 1]).unwrap()).unwrap(), int(1));
        assert!(CorrSpec::new(vec![]).is_err());
        assert!(CorrSpec::new(vec![0, 0]).is_err());
    }

    #[test]
    fn series_examples() {
        let sq = CorrSpec::power(2).unwrap();
        let v = corr_series(&ProductSpec::fibonacci(0), &sq, 5, &lim()).unwrap();
        assert_eq!(v, [1, 2, 4, 10, 24, 60].map(int));
        let u = corr_series(&ProductSpec::stern(0), &sq, 2, &lim()).unwrap();
        assert_eq!(u, [1, 3, 13].map(int));
        let z = corr_series(&ProductSpec::fibonacci(0), &sq, 0, &lim()).unwrap();
        assert_eq!(z, [int(1)]);
    }

    #[test]
    fn symbolic_series() {
        let spec = ProductSpec::weighted(RecurrentSeq::fibonacci(), 1, TPoly::var(), 0);
        let v = corr_series(&spec, &CorrSpec::power(2).unwrap(), 2, &lim()).unwrap();
        assert_eq!(v[2], TPoly::from_i64s(&[1, 0, 2, 0, 1]));
    }

    #[test]
    fn residue_examples() {
        assert_eq!(residue_count(&fibp(2), 2, 1).unwrap(), 4);
        assert_eq!(residue_count(&fibp(2), 2, 0).unwrap(), 0);
        assert_eq!(residue_count(&fibp(0), 2, 1).unwrap(), 1);
        assert!(residue_count(&fibp(0), 2, 2).is_err());
        let sym = build_product::<TPoly>(&ProductSpec::weighted(RecurrentSeq::fibonacci(), 1, TPoly::var(), 2), &lim())
            .unwrap();
        assert!(residue_count(&sym, 2, 1).is_err());
    }

    #[test]
    fn residue_pipeline_matches_direct_counts() {
        let h = residue_series(&ProductSpec::fibonacci(0), 12, 14, &lim()).unwrap();
        assert_eq!(h.len(), 15);
        for (n, hist) in h.iter().enumerate() {
            let p = fibp(n);
            for m in [2u64, 3, 4] {
                let folded = fold_residues(hist, m).unwrap();
                for a in 0..m {
                    assert_eq!(folded[a as usize], residue_count(&p, m, a).unwrap(), "n={n} m={m} a={a}");
                }
            }
            assert_eq!(hist.iter().sum::<u64>(), p.degree() + 1);
        }
    }

    #[test]
    fn value_predicate() {
        let nat = RecurrentSeq::from_i64(&[2, -1], &[1, 2]).unwrap();
        let zhao = build_product::<i64>(&ProductSpec::weighted(nat, 0, int(-1), 3), &lim()).unwrap();
        let pm1: BTreeSet<BigInt> = [-1, 1].into_iter().map(BigInt::from).collect();
        assert!(coefficient_value_predicate(&zhao, &pm1).unwrap());
        assert!(!coefficient_value_predicate(&fibp(3), &pm1).unwrap());
        let one: BTreeSet<BigInt> = [BigInt::one()].into();
        assert!(coefficient_value_predicate(&fibp(0), &one).unwrap());
    }

    #[test]
    fn value_at_one_and_reversal() {
        for n in 0..10 {
            let p = fibp(n);
            assert_eq!(corr_sum(&p, &CorrSpec::power(1).unwrap()).unwrap(), int(1 << n));
        }
    }

    proptest! {
        #[test]
        fn palindromic_alpha_is_reversal_invariant(
            coeffs in prop::collection::vec(-5i64..6, 1..30),
            a0 in 0u32..3, a1 in 0u32..3,
        ) {
            // With alpha_0 = 0 the window hanging off the low end is excluded
            // (k >= 0) while its mirror at the top is not.
            prop_assume!(a0 > 0);
            let alpha = CorrSpec::new(vec![a0, a1, a0]).unwrap();
            let mut rev = coeffs.clone();
            rev.reverse();
            let p = CoeffPoly::from_dense(0, coeffs);
            let q = CoeffPoly::from_dense(0, rev);
            // Reversal only preserves the window sum when no support is lost at either end.
            prop_assume!(p.base() == 0 && q.base() == 0);
            prop_assert_eq!(corr_sum(&p, &alpha).unwrap(), corr_sum(&q, &alpha).unwrap());
        }

        #[test]
        fn machine_and_big_paths_agree(coeffs in prop::collection::vec(-1000i64..1000, 1..40), r in 1u32..6) {
            let p = CoeffPoly::from_dense(0, coeffs);
            let b = p.to_bigint_coeffs().unwrap();
            let alpha = CorrSpec::new(vec![r, 1]).unwrap();
            prop_assert_eq!(corr_sum(&p, &alpha).unwrap(), corr_sum(&b, &alpha).unwrap());
        }
    }
}
