//! Exact products `P(x) * prod_i (1 + a_1 x^{f_i} + ... + a_h x^{f_{i+h-1}})`.
//!
//! Coefficients live in a [`Coef`] ring: `i64` (checked, the fast path),
//! `BigInt`, or [`TPoly`] for a symbolic weight `t`. Each factor is applied
//! in place as `h` shifted adds, scanning from the top so every read sees
//! the previous partial product.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{invalid, violated, Error, Result};
use crate::ring::TPoly;
use crate::sequences::{fib, floor_mul_phi, GoldenInt, RecurrentSeq};

/// Which arithmetic a coefficient type uses; stats pick their fast path by it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefKind {
    Machine,
    Big,
    Symbolic,
}

/// Coefficient ring for products. Fallible operations return `false` on
/// fixed-width overflow and leave `self` unspecified.
pub trait Coef: Clone + PartialEq + fmt::Debug + Zero + One + Send + Sync + 'static {
    const KIND: CoefKind;

    /// `None` when the value is not representable (symbolic into integers).
    fn from_tpoly(t: &TPoly) -> Option<Self>;
    fn to_tpoly(&self) -> TPoly;
    fn to_bigint(&self) -> Option<BigInt>;
    fn add_assign_checked(&mut self, x: &Self) -> bool;
    fn add_mul_assign(&mut self, a: &Self, x: &Self) -> bool;
    /// Rough heap-inclusive size of one coefficient after `n` factors of
    /// `t`-degree `tdeg`.
    fn bytes_hint(n: usize, tdeg: usize) -> u64;
}

impl Coef for i64 {
    const KIND: CoefKind = CoefKind::Machine;

    fn from_tpoly(t: &TPoly) -> Option<Self> {
        t.as_integer()?.to_i64()
    }
    fn to_tpoly(&self) -> TPoly {
        TPoly::constant(BigInt::from(*self))
    }
    fn to_bigint(&self) -> Option<BigInt> {
        Some(BigInt::from(*self))
    }
    #[inline]
    fn add_assign_checked(&mut self, x: &Self) -> bool {
        match self.checked_add(*x) {
            Some(v) => {
                *self = v;
                true
            }
            None => false,
        }
    }
    #[inline]
    fn add_mul_assign(&mut self, a: &Self, x: &Self) -> bool {
        match a.checked_mul(*x).and_then(|p| self.checked_add(p)) {
            Some(v) => {
                *self = v;
                true
            }
            None => false,
        }
    }
    fn bytes_hint(_: usize, _: usize) -> u64 {
        8
    }
}

impl Coef for BigInt {
    const KIND: CoefKind = CoefKind::Big;

    fn from_tpoly(t: &TPoly) -> Option<Self> {
        t.as_integer()
    }
    fn to_tpoly(&self) -> TPoly {
        TPoly::constant(self.clone())
    }
    fn to_bigint(&self) -> Option<BigInt> {
        Some(self.clone())
    }
    fn add_assign_checked(&mut self, x: &Self) -> bool {
        *self += x;
        true
    }
    fn add_mul_assign(&mut self, a: &Self, x: &Self) -> bool {
        *self += a * x;
        true
    }
    fn bytes_hint(n: usize, _: usize) -> u64 {
        32 + 8 * (n as u64 / 32)
    }
}

impl Coef for TPoly {
    const KIND: CoefKind = CoefKind::Symbolic;

    fn from_tpoly(t: &TPoly) -> Option<Self> {
        Some(t.clone())
    }
    fn to_tpoly(&self) -> TPoly {
        self.clone()
    }
    fn to_bigint(&self) -> Option<BigInt> {
        self.as_integer()
    }
    fn add_assign_checked(&mut self, x: &Self) -> bool {
        *self = &*self + x;
        true
    }
    fn add_mul_assign(&mut self, a: &Self, x: &Self) -> bool {
        self.add_scaled_shifted_poly(a, x);
        true
    }
    fn bytes_hint(n: usize, tdeg: usize) -> u64 {
        24 + 40 * (n * tdeg.max(1) + 1) as u64
    }
}

impl TPoly {
    /// `self += a * x` without allocating the product separately.
    fn add_scaled_shifted_poly(&mut self, a: &TPoly, x: &TPoly) {
        for (k, c) in a.coeffs().iter().enumerate() {
            self.add_scaled_shifted(x, c, k);
        }
    }
}

/// Memory guard for the polynomial engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_terms: u64,
    pub max_bytes: u64,
}

impl Limits {
    /// Desk-scale default: about `I_30` for the Fibonacci product.
    pub const DEFAULT_MAX_TERMS: u64 = 4_000_000;
    pub const DEFAULT_MAX_MB: u64 = 2048;

    /// Default term cap; byte cap from `RGF_MAX_MEM_MB` when set.
    pub fn from_env() -> Self {
        let mb = std::env::var("RGF_MAX_MEM_MB")
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .unwrap_or(Self::DEFAULT_MAX_MB);
        Self { max_terms: Self::DEFAULT_MAX_TERMS, max_bytes: mb.saturating_mul(1 << 20) }
    }

    pub fn with_max_terms(mut self, max_terms: u64) -> Self {
        self.max_terms = max_terms;
        self
    }

    pub fn with_max_mb(mut self, mb: u64) -> Self {
        self.max_bytes = mb.saturating_mul(1 << 20);
        self
    }

    pub fn check(&self, n: usize, terms: u64, elem_bytes: u64) -> Result<()> {
        let needed = terms.saturating_mul(elem_bytes);
        let limit = self.max_bytes.min(self.max_terms.saturating_mul(elem_bytes));
        if terms > self.max_terms || needed > self.max_bytes {
            return Err(Error::ResourceLimit { n, needed_bytes: needed, limit_bytes: limit });
        }
        Ok(())
    }
}

impl Default for Limits {
    fn default() -> Self {
        Self::from_env()
    }
}

/// Storage for a polynomial; keys and indices are offsets from the base exponent.
#[derive(Clone, Debug, PartialEq)]
pub enum Layout<C> {
    Dense(Vec<C>),
    Sparse(BTreeMap<u64, C>),
}

/// Polynomial in `x` whose lowest stored exponent is `base`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffPoly<C> {
    base: u64,
    layout: Layout<C>,
}

impl<C: Coef> CoeffPoly<C> {
    pub fn one() -> Self {
        Self { base: 0, layout: Layout::Dense(vec![C::one()]) }
    }

    /// Dense polynomial from ascending coefficients starting at `x^base`;
    /// leading and trailing zeros are absorbed.
    pub fn from_dense(base: u64, coeffs: Vec<C>) -> Self {
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == coeffs.len() {
            return Self { base: 0, layout: Layout::Dense(Vec::new()) };
        }
        let mut v: Vec<C> = coeffs.into_iter().skip(lead).collect();
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        Self { base: base + lead as u64, layout: Layout::Dense(v) }
    }

    pub fn from_sparse(terms: BTreeMap<u64, C>) -> Self {
        let terms: BTreeMap<u64, C> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let base = terms.keys().next().copied().unwrap_or(0);
        let layout = Layout::Sparse(terms.into_iter().map(|(k, c)| (k - base, c)).collect());
        Self { base, layout }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn layout(&self) -> &Layout<C> {
        &self.layout
    }

    pub fn is_zero(&self) -> bool {
        match &self.layout {
            Layout::Dense(v) => v.is_empty(),
            Layout::Sparse(m) => m.is_empty(),
        }
    }

    /// Highest exponent with a nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> u64 {
        match &self.layout {
            Layout::Dense(v) => self.base + v.len().saturating_sub(1) as u64,
            Layout::Sparse(m) => self.base + m.keys().next_back().copied().unwrap_or(0),
        }
    }

    pub fn coeff(&self, e: u64) -> C {
        if e < self.base {
            return C::zero();
        }
        let k = e - self.base;
        match &self.layout {
            Layout::Dense(v) => v.get(k as usize).cloned().unwrap_or_else(C::zero),
            Layout::Sparse(m) => m.get(&k).cloned().unwrap_or_else(C::zero),
        }
    }

    /// Coefficients of `x^base..=x^degree` when stored densely.
    pub fn dense(&self) -> Option<&[C]> {
        match &self.layout {
            Layout::Dense(v) => Some(v),
            Layout::Sparse(_) => None,
        }
    }

    /// All coefficients of `x^0..=x^degree`, zeros included.
    pub fn to_dense_vec(&self) -> Vec<C> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut out = vec![C::zero(); self.degree() as usize + 1];
        for (e, c) in self.nonzero_terms() {
            out[e as usize] = c.clone();
        }
        out
    }

    /// `(exponent, coefficient)` for every nonzero coefficient, ascending.
    pub fn nonzero_terms(&self) -> Vec<(u64, &C)> {
        match &self.layout {
            Layout::Dense(v) => {
                v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (self.base + k as u64, c)).collect()
            }
            Layout::Sparse(m) => m.iter().map(|(k, c)| (self.base + k, c)).collect(),
        }
    }

    /// The nonzero coefficients in order of exponent.
    pub fn nonzero_coefficients(&self) -> Vec<C> {
        self.nonzero_terms().into_iter().map(|(_, c)| c.clone()).collect()
    }

    pub fn num_nonzero(&self) -> usize {
        match &self.layout {
            Layout::Dense(v) => v.iter().filter(|c| !c.is_zero()).count(),
            Layout::Sparse(m) => m.len(),
        }
    }

    pub fn map<D: Coef>(&self, f: impl Fn(&C) -> D) -> CoeffPoly<D> {
        match &self.layout {
            Layout::Dense(v) => CoeffPoly::from_dense(self.base, v.iter().map(f).collect()),
            Layout::Sparse(m) => CoeffPoly::from_sparse(m.iter().map(|(k, c)| (self.base + k, f(c))).collect()),
        }
    }

    pub fn to_tpoly_coeffs(&self) -> CoeffPoly<TPoly> {
        self.map(|c| c.to_tpoly())
    }

    /// Coefficients as big integers, failing for symbolic entries.
    pub fn to_bigint_coeffs(&self) -> Result<CoeffPoly<BigInt>> {
        if let Some((e, _)) = self.nonzero_terms().into_iter().find(|(_, c)| c.to_bigint().is_none()) {
            return invalid(format!("coefficient of x^{e} is not an integer (symbolic t)"));
        }
        Ok(self.map(|c| c.to_bigint().expect("checked above")))
    }

    /// Multiply in place by `1 + sum a_j x^{e_j}` with every `e_j >= 1`.
    fn mul_factor(&mut self, terms: &[(u64, C)]) -> Result<()> {
        if terms.is_empty() {
            return Ok(());
        }
        match &mut self.layout {
            Layout::Dense(v) => mul_factor_dense(v, terms),
            Layout::Sparse(m) => {
                let mut out: BTreeMap<u64, C> = BTreeMap::new();
                for (&k, c) in m.iter() {
                    if !out.entry(k).or_insert_with(C::zero).add_assign_checked(c) {
                        return Err(Error::Overflow("sparse product"));
                    }
                    for (e, a) in terms {
                        if !out.entry(k + e).or_insert_with(C::zero).add_mul_assign(a, c) {
                            return Err(Error::Overflow("sparse product"));
                        }
                    }
                }
                out.retain(|_, c| !c.is_zero());
                *m = out;
                Ok(())
            }
        }
    }

    /// `{"base":b,"coeffs":[[t-coefficients]...]}`; sparse layouts use
    /// `"terms":[[exponent,[t-coefficients]]...]`. Zero is written `["0"]`.
    pub fn to_json(&self) -> Value {
        let tp = |c: &C| -> Value {
            let t = c.to_tpoly();
            if t.is_zero() {
                json!(["0"])
            } else {
                Value::Array(t.coeffs().iter().map(|x| Value::String(x.to_string())).collect())
            }
        };
        match &self.layout {
            Layout::Dense(v) => json!({"base": self.base, "coeffs": v.iter().map(tp).collect::<Vec<_>>()}),
            Layout::Sparse(m) => json!({
                "base": self.base,
                "terms": m.iter().map(|(k, c)| json!([self.base + k, tp(c)])).collect::<Vec<_>>()
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let base = v.get("base").and_then(Value::as_u64).unwrap_or(0);
        let parse_t = |x: &Value| -> Result<C> {
            let arr = x.as_array().ok_or_else(|| Error::Parse("coefficient must be an array".into()))?;
            let cs = arr
                .iter()
                .map(|s| {
                    s.as_str()
                        .ok_or_else(|| Error::Parse("t-coefficient must be a decimal string".into()))?
                        .parse::<BigInt>()
                        .map_err(|e| Error::Parse(e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            C::from_tpoly(&TPoly::new(cs))
                .ok_or_else(|| Error::InvalidArgument("symbolic coefficient for an integer polynomial".into()))
        };
        if let Some(cs) = v.get("coeffs").and_then(Value::as_array) {
            let coeffs = cs.iter().map(parse_t).collect::<Result<Vec<_>>>()?;
            return Ok(Self::from_dense(base, coeffs));
        }
        if let Some(ts) = v.get("terms").and_then(Value::as_array) {
            let mut m = BTreeMap::new();
            for t in ts {
                let pair = t
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| Error::Parse("term must be [exp, coeff]".into()))?;
                let e = pair[0].as_u64().ok_or_else(|| Error::Parse("exponent must be an integer".into()))?;
                m.insert(e, parse_t(&pair[1])?);
            }
            return Ok(Self::from_sparse(m));
        }
        Err(Error::Parse("polynomial JSON needs \"coeffs\" or \"terms\"".into()))
    }
}

fn mul_factor_dense<C: Coef>(v: &mut Vec<C>, terms: &[(u64, C)]) -> Result<()> {
    let old_len = v.len();
    if old_len == 0 {
        return Ok(());
    }
    let emax = terms.iter().map(|(e, _)| *e).max().unwrap_or(0) as usize;
    v.reserve_exact(emax);
    v.resize(old_len + emax, C::zero());
    let unit: Vec<bool> = terms.iter().map(|(_, a)| a.is_one()).collect();
    for k in (1..v.len()).rev() {
        let (lo, hi) = v.split_at_mut(k);
        let slot = &mut hi[0];
        for ((e, a), &is_unit) in terms.iter().zip(&unit) {
            let e = *e as usize;
            if k < e || k - e >= old_len {
                continue;
            }
            let src = &lo[k - e];
            if src.is_zero() {
                continue;
            }
            let ok = if is_unit { slot.add_assign_checked(src) } else { slot.add_mul_assign(a, src) };
            if !ok {
                return Err(Error::Overflow("dense product"));
            }
        }
    }
    Ok(())
}

/// Description of `P(x) * prod_{i=1}^n (1 + sum_{j=1}^h a_j x^{f_{i+j-1+offset}})`.
#[derive(Clone, Debug)]
pub struct ProductSpec {
    pub exponent_seq: RecurrentSeq,
    pub offset: usize,
    /// `a_1..a_h`; `h` is the length.
    pub a: Vec<TPoly>,
    pub prefactor: CoeffPoly<TPoly>,
    pub n: usize,
}

impl ProductSpec {
    pub fn new(exponent_seq: RecurrentSeq, offset: usize, a: Vec<TPoly>, n: usize) -> Self {
        Self { exponent_seq, offset, a, prefactor: CoeffPoly::one(), n }
    }

    /// `I_n = prod (1 + x^{F_{i+1}})`.
    pub fn fibonacci(n: usize) -> Self {
        Self::weighted(RecurrentSeq::fibonacci(), 1, TPoly::one(), n)
    }

    /// `prod (1 + t x^{F^{(k)}_{i+k-1}})`.
    pub fn kbonacci(k: usize, t: TPoly, n: usize) -> Result<Self> {
        if k < 2 {
            return invalid("k-bonacci products need k >= 2");
        }
        Ok(Self::weighted(RecurrentSeq::kbonacci(k)?, k - 1, t, n))
    }

    /// `prod (1 + t x^{f_{i+offset}})`.
    pub fn weighted(seq: RecurrentSeq, offset: usize, t: TPoly, n: usize) -> Self {
        Self::new(seq, offset, vec![t], n)
    }

    /// Stern's `S_n = prod_{i=0}^{n-1} (1 + x^{2^i} + x^{2^{i+1}})`.
    pub fn stern(n: usize) -> Self {
        Self::new(RecurrentSeq::powers_of_two(), 0, vec![TPoly::one(), TPoly::one()], n)
    }

    pub fn with_prefactor(mut self, p: CoeffPoly<TPoly>) -> Self {
        self.prefactor = p;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn h(&self) -> usize {
        self.a.len()
    }

    pub fn is_symbolic(&self) -> bool {
        self.a.iter().any(|c| !c.is_constant()) || self.prefactor.nonzero_terms().iter().any(|(_, c)| !c.is_constant())
    }

    /// Substitute an integer for `t`.
    pub fn specialize(&self, t: &BigInt) -> Self {
        let mut s = self.clone();
        s.a = self.a.iter().map(|c| TPoly::constant(c.eval(t))).collect();
        s.prefactor = self.prefactor.map(|c| TPoly::constant(c.eval(t)));
        s
    }

    /// Nonzero terms `(exponent, coefficient)` of factor `i` (1-based).
    pub fn factor_terms(&self, i: usize) -> Result<Vec<(u64, TPoly)>> {
        if i == 0 {
            return invalid("factor indices start at 1");
        }
        let mut out = Vec::new();
        for (j, a) in self.a.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let idx = i + j + self.offset;
            let f = self.exponent_seq.term(idx)?;
            if !f.is_positive() {
                return invalid(format!("exponent f_{idx} = {f} must be at least 1"));
            }
            let e = f.to_u64().ok_or_else(|| Error::InvalidArgument(format!("exponent f_{idx} exceeds 64 bits")))?;
            out.push((e, a.clone()));
        }
        Ok(out)
    }

    /// Degree bound after `n` factors (exact unless top coefficients cancel).
    pub fn degree_after(&self, n: usize) -> Result<u64> {
        let mut d = self.prefactor.degree();
        for i in 1..=n {
            let top = self.factor_terms(i)?.iter().map(|(e, _)| *e).max().unwrap_or(0);
            d = d.checked_add(top).ok_or_else(|| Error::InvalidArgument("degree exceeds 64 bits".into()))?;
        }
        Ok(d)
    }

    /// Upper bound on the number of nonzero coefficients after `n` factors.
    fn support_bound(&self, n: usize) -> u64 {
        let per = 1 + self.a.iter().filter(|c| !c.is_zero()).count() as u64;
        let mut b = self.prefactor.num_nonzero() as u64;
        for _ in 0..n {
            b = b.saturating_mul(per);
        }
        b
    }

    fn max_t_degree(&self) -> usize {
        self.a.iter().filter_map(|c| c.degree()).max().unwrap_or(0)
    }
}

/// Expand the product, calling `on_factor(m, partial)` for the prefactor
/// (`m = 0`) and after each factor `m = 1..=n`.
///
/// The layout is dense unless fewer than a quarter of the exponents up to
/// the final degree can carry a nonzero coefficient.
pub fn build_product_with<C: Coef>(
    spec: &ProductSpec,
    limits: &Limits,
    mut on_factor: impl FnMut(usize, &CoeffPoly<C>) -> Result<()>,
) -> Result<CoeffPoly<C>> {
    let pre = spec
        .prefactor
        .nonzero_terms()
        .into_iter()
        .map(|(e, c)| C::from_tpoly(c).map(|c| (e, c)))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::InvalidArgument("symbolic product needs t-polynomial coefficients".into()))?;
    let final_degree = spec.degree_after(spec.n)?;
    let span = final_degree - spec.prefactor.base() + 1;
    let sparse = spec.support_bound(spec.n).saturating_mul(4) < span;
    let mut p = if sparse {
        CoeffPoly::from_sparse(pre.into_iter().collect())
    } else {
        let base = spec.prefactor.base();
        // Reserve the final length up front when it fits, so growth never reallocates.
        let fits = limits.check(spec.n, span, C::bytes_hint(spec.n, spec.max_t_degree())).is_ok();
        let mut v = Vec::with_capacity(if fits { span as usize } else { 0 });
        v.resize((spec.prefactor.degree() - base + 1) as usize, C::zero());
        for (e, c) in pre {
            v[(e - base) as usize] = c;
        }
        CoeffPoly { base, layout: Layout::Dense(v) }
    };
    let elem = C::bytes_hint(spec.n, spec.max_t_degree());
    on_factor(0, &p)?;
    let mut degree = spec.prefactor.degree();
    for i in 1..=spec.n {
        let terms = spec.factor_terms(i)?;
        degree += terms.iter().map(|(e, _)| *e).max().unwrap_or(0);
        let stored = if sparse { spec.support_bound(i).min(degree - p.base + 1) } else { degree - p.base + 1 };
        limits.check(i, stored, elem)?;
        let terms = terms
            .into_iter()
            .map(|(e, a)| C::from_tpoly(&a).map(|a| (e, a)))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidArgument("symbolic factor for an integer coefficient ring".into()))?;
        p.mul_factor(&terms)?;
        on_factor(i, &p)?;
    }
    Ok(p)
}

pub fn build_product<C: Coef>(spec: &ProductSpec, limits: &Limits) -> Result<CoeffPoly<C>> {
    build_product_with(spec, limits, |_, _| Ok(()))
}

/// A product in the cheapest coefficient ring that holds it exactly.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyPoly {
    Machine(CoeffPoly<i64>),
    Big(CoeffPoly<BigInt>),
    Symbolic(CoeffPoly<TPoly>),
}

impl AnyPoly {
    pub fn to_json(&self) -> Value {
        match self {
            AnyPoly::Machine(p) => p.to_json(),
            AnyPoly::Big(p) => p.to_json(),
            AnyPoly::Symbolic(p) => p.to_json(),
        }
    }

    pub fn to_tpoly_coeffs(&self) -> CoeffPoly<TPoly> {
        match self {
            AnyPoly::Machine(p) => p.to_tpoly_coeffs(),
            AnyPoly::Big(p) => p.to_tpoly_coeffs(),
            AnyPoly::Symbolic(p) => p.clone(),
        }
    }

    pub fn to_bigint_coeffs(&self) -> Result<CoeffPoly<BigInt>> {
        match self {
            AnyPoly::Machine(p) => p.to_bigint_coeffs(),
            AnyPoly::Big(p) => Ok(p.clone()),
            AnyPoly::Symbolic(p) => p.to_bigint_coeffs(),
        }
    }
}

/// Build with `i64`, falling back to `BigInt` on overflow, or with `TPoly`
/// when the spec is symbolic.
pub fn build_product_auto(spec: &ProductSpec, limits: &Limits) -> Result<AnyPoly> {
    if spec.is_symbolic() {
        return build_product::<TPoly>(spec, limits).map(AnyPoly::Symbolic);
    }
    match build_product::<i64>(spec, limits) {
        Ok(p) => Ok(AnyPoly::Machine(p)),
        Err(Error::Overflow(_)) => build_product::<BigInt>(spec, limits).map(AnyPoly::Big),
        Err(e) => Err(e),
    }
}

/// Expansion of `G_n(x) = prod_{i<n} (1 + x^{phi^i})` with exponents in `Z[phi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GoldenSeries {
    pub terms: Vec<(GoldenInt, BigInt)>,
}

impl GoldenSeries {
    pub fn coefficients(&self) -> Vec<BigInt> {
        self.terms.iter().map(|(_, c)| c.clone()).collect()
    }
}

pub fn golden_series(n: usize) -> GoldenSeries {
    let mut acc: BTreeMap<GoldenInt, BigInt> = BTreeMap::new();
    acc.insert(GoldenInt::zero(), BigInt::one());
    for i in 0..n {
        let e = GoldenInt::phi_pow(i);
        let mut next = acc.clone();
        for (x, c) in &acc {
            *next.entry(x + &e).or_insert_with(BigInt::zero) += c;
        }
        acc = next;
    }
    GoldenSeries { terms: acc.into_iter().collect() }
}

/// Maximal block of terms whose exponents step by exactly 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Run {
    pub start: GoldenInt,
    pub coeffs: Vec<BigInt>,
}

impl Run {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Split a golden series into maximal unit-step runs; every run must have
/// two or three terms. Runs are ordered but may be closer than 1 (the gap
/// between `x^1` and `x^phi` is `phi - 1`).
pub fn run_decomposition(g: &GoldenSeries) -> Result<Vec<Run>> {
    let one = GoldenInt::one();
    let mut runs: Vec<Run> = Vec::new();
    let mut prev: Option<&GoldenInt> = None;
    for (e, c) in &g.terms {
        match prev {
            Some(p) if e - p == one => runs.last_mut().expect("open run").coeffs.push(c.clone()),
            _ => runs.push(Run { start: e.clone(), coeffs: vec![c.clone()] }),
        }
        prev = Some(e);
    }
    if let Some((i, r)) = runs.iter().enumerate().find(|(_, r)| r.len() != 2 && r.len() != 3) {
        return violated(format!("run {} starting at {} has length {}", i + 1, r.start, r.len()));
    }
    Ok(runs)
}

/// `1 + floor(i phi) - floor((i-1) phi)`.
pub fn run_length_formula(i: u64) -> u64 {
    1 + floor_mul_phi(i) - floor_mul_phi(i.saturating_sub(1))
}

/// Check run lengths against the floor formula on the first half, the
/// palindromic symmetry, and the run count `F_{n+1}`.
pub fn check_run_structure(n: usize, runs: &[Run]) -> Result<()> {
    let expected = fib(n + 1) as usize;
    if runs.len() != expected {
        return violated(format!("n={n}: {} runs, expected F_{} = {expected}", runs.len(), n + 1));
    }
    let d: Vec<u64> = runs.iter().map(|r| r.len() as u64).collect();
    for i in 0..d.len() {
        if d[i] != d[d.len() - 1 - i] {
            return violated(format!("n={n}: run lengths not palindromic at {}", i + 1));
        }
    }
    for i in 1..=d.len().div_ceil(2) {
        let want = run_length_formula(i as u64);
        if d[i - 1] != want {
            return violated(format!("n={n}: d({i}) = {}, formula gives {want}", d[i - 1]));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(p: &CoeffPoly<i64>) -> Vec<i64> {
        p.to_dense_vec()
    }

    fn lim() -> Limits {
        Limits { max_terms: 10_000_000, max_bytes: 1 << 30 }
    }

    #[test]
    fn fibonacci_products() {
        let i0 = build_product::<i64>(&ProductSpec::fibonacci(0), &lim()).unwrap();
        assert_eq!(ints(&i0), [1]);
        let i1 = build_product::<i64>(&ProductSpec::fibonacci(1), &lim()).unwrap();
        assert_eq!(ints(&i1), [1, 1]);
        let i3 = build_product::<i64>(&ProductSpec::fibonacci(3), &lim()).unwrap();
        assert_eq!(ints(&i3), [1, 1, 1, 2, 1, 1, 1]);
        let i4 = build_product::<i64>(&ProductSpec::fibonacci(4), &lim()).unwrap();
        assert_eq!(ints(&i4), [1, 1, 1, 2, 1, 2, 2, 1, 2, 1, 1, 1]);
    }

    #[test]
    fn weighted_products() {
        // f_i = i
        let nat = RecurrentSeq::from_i64(&[2, -1], &[1, 2]).unwrap();
        let spec = ProductSpec::weighted(nat, 0, TPoly::from_i64s(&[-1]), 3);
        let p = build_product::<i64>(&spec, &lim()).unwrap();
        assert_eq!(ints(&p), [1, -1, -1, 0, 1, 1, -1]);

        let sym = ProductSpec::fibonacci(2).specialize(&BigInt::from(1));
        assert!(!sym.is_symbolic());
        let t = ProductSpec::weighted(RecurrentSeq::fibonacci(), 1, TPoly::var(), 2);
        let p = build_product::<TPoly>(&t, &lim()).unwrap();
        let want = [TPoly::one(), TPoly::var(), TPoly::var(), TPoly::var().pow(2)];
        assert_eq!(p.to_dense_vec(), want);
        assert!(build_product::<i64>(&t, &lim()).is_err());
    }

    #[test]
    fn degree_and_gap_free() {
        for n in 0..=20 {
            let p = build_product::<i64>(&ProductSpec::fibonacci(n), &lim()).unwrap();
            assert_eq!(p.degree(), fib(n + 3) - 2);
            assert!(p.dense().unwrap().iter().all(|&c| c > 0));
        }
    }

    #[test]
    fn stern_product() {
        let p = build_product::<i64>(&ProductSpec::stern(2), &lim()).unwrap();
        assert_eq!(ints(&p), [1, 1, 2, 1, 2, 1, 1]);
    }

    #[test]
    fn sparse_fallback() {
        let pow3 = RecurrentSeq::from_i64(&[3], &[1]).unwrap();
        let spec = ProductSpec::weighted(pow3, 0, TPoly::one(), 8);
        let p = build_product::<i64>(&spec, &lim()).unwrap();
        assert!(matches!(p.layout(), Layout::Sparse(_)));
        assert_eq!(p.num_nonzero(), 256);
        assert!(p.nonzero_coefficients().iter().all(|&c| c == 1));
        assert_eq!(p.degree(), (3u64.pow(8) - 1) / 2);
        let back = CoeffPoly::<i64>::from_json(&p.to_json()).unwrap();
        assert_eq!(back.to_dense_vec(), p.to_dense_vec());
    }

    #[test]
    fn overflow_falls_back() {
        let spec = ProductSpec::weighted(RecurrentSeq::fibonacci(), 1, TPoly::from_i64s(&[1_000_000_000]), 4);
        assert!(matches!(build_product::<i64>(&spec, &lim()), Err(Error::Overflow(_))));
        match build_product_auto(&spec, &lim()).unwrap() {
            AnyPoly::Big(p) => assert_eq!(p.coeff(fib(7) - 2), BigInt::from(10u64).pow(36)),
            other => panic!("expected big-integer product, got {other:?}"),
        }
    }

    #[test]
    fn memory_guard_names_n() {
        let l = Limits { max_terms: 100, max_bytes: 1 << 30 };
        match build_product::<i64>(&ProductSpec::fibonacci(12), &l) {
            Err(Error::ResourceLimit { n, .. }) => assert_eq!(n, 9),
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn json_dump() {
        let p = build_product::<i64>(&ProductSpec::fibonacci(1), &lim()).unwrap();
        assert_eq!(p.to_json().to_string(), r#"{"base":0,"coeffs":[["1"],["1"]]}"#);
        let z = CoeffPoly::from_dense(0, vec![1i64, 0, 2]);
        assert_eq!(z.to_json().to_string(), r#"{"base":0,"coeffs":[["1"],["0"],["2"]]}"#);
    }

    #[test]
    fn golden_and_runs() {
        let g1 = golden_series(1);
        assert_eq!(g1.terms, vec![(GoldenInt::zero(), BigInt::one()), (GoldenInt::one(), BigInt::one())]);
        let g5 = golden_series(5);
        let want = [1, 1, 1, 2, 1, 2, 2, 1, 3, 2, 2, 3, 1, 2, 2, 1, 2, 1, 1, 1];
        assert_eq!(g5.coefficients(), want.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>());
        let runs = run_decomposition(&g5).unwrap();
        let lens: Vec<usize> = runs.iter().map(Run::len).collect();
        assert_eq!(lens, [2, 3, 2, 3, 3, 2, 3, 2]);
        check_run_structure(5, &runs).unwrap();
        assert_eq!((1..=4).map(run_length_formula).collect::<Vec<_>>(), [2, 3, 2, 3]);
    }
}
