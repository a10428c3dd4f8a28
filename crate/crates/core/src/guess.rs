//! Exact rational generating functions: fitting from data, series
//! expansion, a catalog of closed forms, and structural validators.
//!
//! [`RationalFunc`] is a numerator/denominator pair in `x` over any
//! [`Ring`]. Closed forms live over `Z[t]` ([`TForm`]); fits to integer
//! data live over `Q` ([`QForm`]); symbolic fits live over `Q(t)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::ring::{lcm_of_denominators, Field, Poly, RatFunc, Ring, TPoly};

/// `num(x) / den(x)` with `den(0) = 1`.
#[derive(Clone, PartialEq)]
pub struct RationalFunc<R> {
    num: Poly<R>,
    den: Poly<R>,
}

/// Closed form with coefficients in `Z[t]`.
pub type TForm = RationalFunc<TPoly>;
/// Rational function with rational coefficients.
pub type QForm = RationalFunc<BigRational>;
/// Rational function with coefficients in `Q(t)`.
pub type SymForm = RationalFunc<RatFunc>;

impl<R: Ring> RationalFunc<R> {
    /// Scale so that `den(0) = 1`; `den(0)` must be a unit.
    pub fn new(num: Poly<R>, den: Poly<R>) -> Result<Self> {
        let d0 = den.at_zero();
        let Some(inv) = d0.unit_inverse() else {
            return invalid(format!("denominator constant term {d0:?} is not invertible"));
        };
        Ok(Self { num: num.scale(&inv), den: den.scale(&inv) })
    }

    pub fn num(&self) -> &Poly<R> {
        &self.num
    }

    pub fn den(&self) -> &Poly<R> {
        &self.den
    }

    /// First `n` power-series coefficients, by the denominator recurrence.
    pub fn series(&self, n: usize) -> Vec<R> {
        let mut out: Vec<R> = Vec::with_capacity(n);
        let dd = self.den.coeffs();
        for i in 0..n {
            let mut c = self.num.coeff(i);
            for (j, dj) in dd.iter().enumerate().skip(1).take(i) {
                if !dj.is_zero() {
                    c = c - dj.clone() * out[i - j].clone();
                }
            }
            out.push(c);
        }
        out
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Result<RationalFunc<S>> {
        RationalFunc::new(self.num.map(&f), self.den.map(&f))
    }
}

impl<F: Field> RationalFunc<F> {
    /// Reduced form: `gcd(num, den) = 1` and `den(0) = 1`.
    pub fn reduced(num: Poly<F>, den: Poly<F>) -> Result<Self> {
        if den.is_zero() {
            return invalid("zero denominator");
        }
        if num.is_zero() {
            return Ok(Self { num, den: Poly::one() });
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        if den.at_zero().is_zero() {
            return invalid("not a power series: the reduced denominator vanishes at x = 0");
        }
        Self::new(num, den)
    }

    pub fn reduce(&self) -> Result<Self> {
        Self::reduced(self.num.clone(), self.den.clone())
    }
}

/// Expand `rf` to `n` terms; an error when `den(0)` is not invertible.
pub fn series_expand<R: Ring>(num: &Poly<R>, den: &Poly<R>, n: usize) -> Result<Vec<R>> {
    Ok(RationalFunc::new(num.clone(), den.clone())?.series(n))
}

fn q(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}

impl QForm {
    pub fn from_i64s(num: &[i64], den: &[i64]) -> Result<Self> {
        let p = |v: &[i64]| Poly::new(v.iter().map(|&c| BigRational::from_integer(c.into())).collect());
        Self::reduced(p(num), p(den))
    }

    pub fn from_integer_polys(num: &TPoly, den: &TPoly) -> Result<Self> {
        Self::reduced(num.to_qpoly(), den.to_qpoly())
    }

    /// Integer numerator and denominator with no common content and `den(0) > 0`.
    pub fn integer_primitive(&self) -> (TPoly, TPoly) {
        let l = lcm_of_denominators(self.num.coeffs().iter().chain(self.den.coeffs()));
        let to_int = |p: &Poly<BigRational>| TPoly::new(p.coeffs().iter().map(|c| (c * q(&l)).to_integer()).collect());
        let (mut n, mut d) = (to_int(&self.num), to_int(&self.den));
        let g = n.coeffs().iter().chain(d.coeffs()).fold(BigInt::zero(), |g, c| g.gcd(c));
        if !g.is_zero() && !g.is_one() {
            n = n.map(|c| c / &g);
            d = d.map(|c| c / &g);
        }
        if d.at_zero().is_negative() {
            (-n, -d)
        } else {
            (n, d)
        }
    }

    /// Integer coefficients, if `den` and `num` are integral after normalization.
    pub fn to_tform(&self) -> Option<TForm> {
        let conv = |p: &Poly<BigRational>| -> Option<TPoly> {
            let cs: Option<Vec<TPoly>> =
                p.coeffs().iter().map(|c| c.is_integer().then(|| TPoly::constant(c.to_integer()))).collect();
            cs.map(Poly::new).map(|p: Poly<TPoly>| p.map(|c| c.at_zero()))
        };
        let num = conv(&self.num)?;
        let den = conv(&self.den)?;
        Some(RationalFunc {
            num: num.map(|c| TPoly::constant(c.clone())),
            den: den.map(|c| TPoly::constant(c.clone())),
        })
    }

    pub fn to_json(&self) -> Value {
        let (n, d) = self.integer_primitive();
        let s = |p: &TPoly| p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>();
        json!({ "num": s(&n), "den": s(&d) })
    }

    /// Degrees `(deg num, deg den)`; the zero numerator has degree 0.
    pub fn degrees(&self) -> (usize, usize) {
        (self.num.degree().unwrap_or(0), self.den.degree().unwrap_or(0))
    }
}

impl fmt::Display for QForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.integer_primitive();
        write!(f, "({}) / ({})", n.render("x"), d.render("x"))
    }
}

/// `x`-polynomial whose coefficients are `t`-polynomials.
pub type XTPoly = Poly<TPoly>;

fn render_xt(p: &XTPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let body = if c.is_constant() {
            let s = TPoly::constant(c.at_zero()).render("x");
            let mono = TPoly::monomial(c.at_zero(), i).render("x");
            if i == 0 {
                s
            } else {
                mono
            }
        } else {
            let xs = match i {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            };
            format!("({}){xs}", c.render("t"))
        };
        if out.is_empty() {
            out = body;
        } else if let Some(rest) = body.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&body);
        }
    }
    out
}

impl TForm {
    /// `t`-free form from integer coefficient lists.
    pub fn from_i64s(num: &[i64], den: &[i64]) -> Result<Self> {
        Self::new(xt(num), xt(den))
    }

    /// Substitute an integer for `t`; the result is reduced over `Q`.
    pub fn specialize(&self, t: &BigInt) -> Result<QForm> {
        QForm::reduced(self.num.map(|c| q(&c.eval(t))), self.den.map(|c| q(&c.eval(t))))
    }

    /// Substitute an integer for `t`, keeping `Z[t]` coefficients.
    pub fn at_t(&self, t: &BigInt) -> Self {
        Self { num: self.num.map(|c| TPoly::constant(c.eval(t))), den: self.den.map(|c| TPoly::constant(c.eval(t))) }
    }

    pub fn is_symbolic(&self) -> bool {
        self.num.coeffs().iter().chain(self.den.coeffs()).any(|c| !c.is_constant())
    }

    /// The form over `Q`, for `t`-free forms.
    pub fn to_qform(&self) -> Result<QForm> {
        if self.is_symbolic() {
            return invalid("form depends on t");
        }
        self.specialize(&BigInt::zero())
    }

    /// The form over `Q(t)`, reduced.
    pub fn to_symform(&self) -> Result<SymForm> {
        SymForm::reduced(self.num.map(RatFunc::from_tpoly), self.den.map(RatFunc::from_tpoly))
    }

    pub fn to_json(&self) -> Value {
        let s = |p: &XTPoly| -> Vec<Value> {
            p.coeffs()
                .iter()
                .map(|c| Value::from(c.coeffs().iter().map(|v| v.to_string()).collect::<Vec<_>>()))
                .collect()
        };
        json!({ "num": s(&self.num), "den": s(&self.den) })
    }
}

impl fmt::Display for TForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", render_xt(&self.num), render_xt(&self.den))
    }
}

impl<R: Ring> fmt::Debug for RationalFunc<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} / {:?}", self.num, self.den)
    }
}

/// What to do when fewer terms are supplied than `den_max` requires.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermPolicy {
    /// Reject the request.
    Strict,
    /// Lower `den_max` to the largest degree the data supports.
    Clamp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GuessOptions {
    pub den_max: usize,
    /// Numerator degree may exceed the denominator degree by this much.
    pub num_extra: usize,
    /// Trailing terms used only for verification.
    pub holdout: usize,
    pub policy: TermPolicy,
}

impl Default for GuessOptions {
    fn default() -> Self {
        Self { den_max: 6, num_extra: 0, holdout: 6, policy: TermPolicy::Strict }
    }
}

impl GuessOptions {
    pub fn new(den_max: usize, num_extra: usize, holdout: usize) -> Self {
        Self { den_max, num_extra, holdout, policy: TermPolicy::Strict }
    }

    pub fn clamped(mut self) -> Self {
        self.policy = TermPolicy::Clamp;
        self
    }

    /// Terms needed for `den_max` under these options.
    pub fn required_terms(&self) -> usize {
        2 * self.den_max + self.num_extra + self.holdout
    }

    /// The denominator bound actually searched for `len` terms.
    pub fn effective_den_max(&self, len: usize) -> Result<usize> {
        if len >= self.required_terms() {
            return Ok(self.den_max);
        }
        match self.policy {
            TermPolicy::Strict => invalid(format!(
                "{len} terms cannot support den_max {}: need {} (2*den_max + num_extra + holdout)",
                self.den_max,
                self.required_terms()
            )),
            TermPolicy::Clamp => {
                let spare = len.saturating_sub(self.num_extra + self.holdout);
                if spare < 2 && len < self.num_extra + self.holdout + 1 {
                    return invalid(format!("{len} terms leave nothing to fit after the holdout"));
                }
                Ok(spare / 2)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fit<F: Ring> {
    pub form: RationalFunc<F>,
    /// Denominator bound searched (after clamping).
    pub den_max_used: usize,
}

/// Solve `a x = b` exactly; free variables are set to 0. `None` when inconsistent.
fn solve<F: Field>(mut a: Vec<Vec<F>>, mut b: Vec<F>, cols: usize) -> Option<Vec<F>> {
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].inv();
        for x in &mut a[r][c..cols] {
            *x = x.clone() * inv.clone();
        }
        b[r] = b[r].clone() * inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pivot_row = a[r][c..cols].to_vec();
                for (x, v) in a[i][c..cols].iter_mut().zip(pivot_row) {
                    *x = x.clone() - f.clone() * v;
                }
                let v = b[r].clone();
                b[i] = b[i].clone() - f * v;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if b.iter().skip(r).any(|v| !v.is_zero()) {
        return None;
    }
    let mut x = vec![F::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = b[i].clone();
    }
    Some(x)
}

/// Smallest rational function fitting `seq`: least denominator degree
/// `d <= den_max`, then least numerator degree `e <= d + num_extra`. The
/// denominator is solved exactly on the terms before the holdout and the
/// candidate must reproduce every term.
pub fn guess_rational<F: Field>(seq: &[F], opts: &GuessOptions) -> Result<Option<Fit<F>>> {
    let den_max = opts.effective_den_max(seq.len())?;
    let w = seq.len() - opts.holdout.min(seq.len());
    let s = |i: isize| if i < 0 { F::zero() } else { seq[i as usize].clone() };
    for d in 0..=den_max {
        for e in 0..=d + opts.num_extra {
            if d + e + 1 > w {
                break;
            }
            let rows: Vec<usize> = (e + 1..w).collect();
            let a: Vec<Vec<F>> = rows.iter().map(|&n| (1..=d).map(|j| s(n as isize - j as isize)).collect()).collect();
            let b: Vec<F> = rows.iter().map(|&n| F::zero() - seq[n].clone()).collect();
            let Some(qs) = solve(a, b, d) else {
                continue;
            };
            let mut den = vec![F::one()];
            den.extend(qs);
            let den = Poly::new(den);
            let num: Vec<F> = (0..=e)
                .map(|n| (0..=d.min(n)).fold(F::zero(), |acc, j| acc + den.coeff(j) * seq[n - j].clone()))
                .collect();
            let cand = RationalFunc::new(Poly::new(num), den)?;
            if cand.series(seq.len()) == seq {
                return Ok(Some(Fit { form: cand.reduce()?, den_max_used: den_max }));
            }
        }
    }
    Ok(None)
}

/// [`guess_rational`] on integer data.
pub fn guess_integers(seq: &[BigInt], opts: &GuessOptions) -> Result<Option<Fit<BigRational>>> {
    let qs: Vec<BigRational> = seq.iter().map(q).collect();
    guess_rational(&qs, opts)
}

/// Largest `den_max` accepted by [`guess_symbolic`]; beyond it, compare
/// against a known form with [`agrees_with`] instead.
pub const SYMBOLIC_DEN_MAX: usize = 8;

/// [`guess_rational`] on `Z[t]` data over the field `Q(t)`.
pub fn guess_symbolic(seq: &[TPoly], opts: &GuessOptions) -> Result<Option<Fit<RatFunc>>> {
    if opts.den_max > SYMBOLIC_DEN_MAX {
        return invalid(format!(
            "symbolic fits are limited to den_max {SYMBOLIC_DEN_MAX}; verify against a closed form instead"
        ));
    }
    let rs: Vec<RatFunc> = seq.iter().map(RatFunc::from_tpoly).collect();
    guess_rational(&rs, opts)
}

/// Whether the series of `form` matches `data` term by term.
pub fn agrees_with(form: &TForm, data: &[TPoly]) -> bool {
    form.series(data.len()) == data
}

/// Parameters of catalog entries; unused fields are ignored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormParams {
    pub k: Option<usize>,
    /// `None` keeps `t` symbolic.
    pub t: Option<i64>,
    pub i: Option<usize>,
    pub b: Option<usize>,
    pub r: Option<usize>,
    pub m: Option<usize>,
    pub a: Option<usize>,
    pub alpha: Option<Vec<u32>>,
}

impl FormParams {
    pub fn k(k: usize) -> Self {
        Self { k: Some(k), ..Self::default() }
    }

    pub fn with_t(mut self, t: i64) -> Self {
        self.t = Some(t);
        self
    }

    pub fn with_r(mut self, r: usize) -> Self {
        self.r = Some(r);
        self
    }

    fn need(v: Option<usize>, name: &str, form: &str) -> Result<usize> {
        v.ok_or_else(|| Error::InvalidArgument(format!("form {form} needs parameter {name}")))
    }
}

pub const CATALOG: &[&str] = &[
    "thm1", "thm1t", "vk2n", "stern-u2", "v2m1", "j", "j-alpha", "w", "v3k", "jrk", "h", "h-k21", "h-k31", "phi",
    "gens",
];

fn xt(c: &[i64]) -> XTPoly {
    Poly::new(c.iter().map(|&v| TPoly::constant(v.into())).collect())
}

fn xmono(c: TPoly, e: usize) -> XTPoly {
    Poly::monomial(c, e)
}

fn prod(fs: &[&[i64]]) -> XTPoly {
    fs.iter().fold(XTPoly::one(), |acc, f| &acc * &xt(f))
}

/// `1 + a_1 x + sum_j (a_{2j} x^{jk} + a_{2j+1} x^{jk+1})` over
/// `1 + sum_j a_{2j} x^{jk}`, the shape shared by the `k`-families.
pub fn drx_form(k: usize, a: &[TPoly]) -> Result<TForm> {
    if k < 2 {
        return invalid("k >= 2");
    }
    let mut den = XTPoly::one();
    let mut num = XTPoly::one();
    for (idx, c) in a.iter().enumerate() {
        let i = idx + 1;
        let e = (i / 2) * k + i % 2;
        den = &den + &xmono(c.clone(), e);
        if i % 2 == 0 {
            num = &num + &xmono(c.clone(), e);
        }
    }
    TForm::new(num, den)
}

fn t_int(v: i64) -> TPoly {
    TPoly::constant(v.into())
}

/// The `a_1..a_{2m+1}` of the conjectured `t = 1` families `J_r^{(k)}`.
pub fn jrk_coefficients(r: usize) -> Result<Vec<i64>> {
    Ok(match r {
        2 => vec![-2, -2, 2],
        3 => vec![-2, -4, 2],
        4 => vec![-2, -7, 0, -2, 2],
        5 => vec![-2, -11, -8, -20, 10],
        6 => vec![-2, -17, -28, -88, 26, -4, 4],
        7 => vec![-2, -26, -74, -311, 34, -84, 42],
        _ => return invalid(format!("no printed form for r = {r}")),
    })
}

/// The printed closed form `name` at `params`.
pub fn closed_form(name: &str, p: &FormParams) -> Result<TForm> {
    let t = TPoly::var();
    let t2 = t.pow(2);
    let one = TPoly::one();
    let form = match name {
        "thm1" => TForm::from_i64s(&[1, 0, -2], &[1, -2, -2, 2])?,
        "thm1t" => {
            let num = &XTPoly::one() - &xmono(&t.pow(3) + &t, 2);
            let den = &(&(&XTPoly::one() - &xmono(&t2 + &one, 1)) - &xmono(&t * &(&t2 + &one), 2))
                + &xmono(&t * &(&t.pow(4) + &one), 3);
            TForm::new(num, den)?
        }
        "vk2n" => {
            let k = FormParams::need(p.k, "k", name)?;
            if k < 2 {
                return invalid("vk2n needs k >= 2");
            }
            let tk = t.pow(k as u32 - 1);
            let a2 = -(&tk * &(&one + &t2));
            let num = &XTPoly::one() + &xmono(a2.clone(), k);
            let den =
                &(&(&XTPoly::one() - &xmono(&one + &t2, 1)) + &xmono(a2, k)) + &xmono(&tk * &(&one + &t.pow(4)), k + 1);
            TForm::new(num, den)?
        }
        "stern-u2" => TForm::from_i64s(&[1, -2], &[1, -5, 2])?,
        "v2m1" => TForm::from_i64s(&[1, 0, 2], &[1, -2, 2, -2])?,
        "j" => {
            let r = FormParams::need(p.r, "r", name)?;
            let (n, d): (&[i64], &[i64]) = match r {
                2 => (&[1, 0, -2], &[1, -2, -2, 2]),
                3 => (&[1, 0, -4], &[1, -2, -4, 2]),
                4 => (&[1, 0, -7, 0, -2], &[1, -2, -7, 0, -2, 2]),
                5 => (&[1, 0, -11, 0, -20], &[1, -2, -11, -8, -20, 10]),
                6 => (&[1, 0, -17, 0, -88, 0, -4], &[1, -2, -17, -28, -88, 26, -4, 4]),
                7 => (&[1, 0, -26, 0, -311, 0, -84], &[1, -2, -26, -74, -311, 34, -84, 42]),
                _ => return invalid(format!("no printed J_r for r = {r}")),
            };
            TForm::from_i64s(n, d)?
        }
        "j-alpha" => {
            let alpha = p.alpha.clone().ok_or_else(|| Error::InvalidArgument("form j-alpha needs alpha".into()))?;
            let om: &[i64] = &[1, -1];
            let d2: &[i64] = &[1, -2, -2, 2];
            let d3: &[i64] = &[1, -2, -4, 2];
            let d4: &[i64] = &[1, -2, -7, 0, -2, 2];
            let d5: &[i64] = &[1, -2, -11, -8, -20, 10];
            let (num, den): (&[i64], XTPoly) = match alpha.as_slice() {
                [1, 1] => (&[0, 1, 1], xt(d2)),
                [1, 0, 1] => (&[0, 0, 2, 1, -1], prod(&[om, d2])),
                [2, 1] => (&[0, 1, 1], xt(d3)),
                [1, 3] => (&[0, 1, 1, 1, 1], xt(d4)),
                [2, 2] => (&[0, 1, 1, -1, -1], xt(d4)),
                [2, 3] => (&[0, 1, 1, -1, -1], xt(d5)),
                [1, 1, 1] => (&[0, 0, 2, 2, -2], prod(&[om, d3])),
                [1, 0, 2] => (&[0, 0, 2, 1, -2, 1], prod(&[om, om, d3])),
                [2, 1, 1] => (&[0, 0, 2, 2, -4, 4], prod(&[om, om, d4])),
                [1, 2, 1] => (&[0, 0, 2, 4, -2], prod(&[om, d4])),
                _ => return invalid(format!("no printed J_alpha for alpha = {alpha:?}")),
            };
            TForm::new(xt(num), den)?
        }
        "w" => TForm::from_i64s(&[1, -4, -5, 24, 4, -34, 2, 10, -4], &[1, -7, 1, 47, -32, -84, 50, 34, -18])?,
        "v3k" => {
            let k = FormParams::need(p.k, "k", name)?;
            let t3 = t.pow(3);
            let t9 = t.pow(9);
            let p1 = &one + &t3;
            let m1 = &t3 - &one;
            let a = vec![
                -p1.clone(),
                -(&t3 * &p1.pow(2)),
                &t3 * &(&one + &t9),
                &t9 * &m1.pow(2),
                -(&(&t9 * &m1.pow(2)) * &p1),
            ];
            drx_form(k, &a)?
        }
        "jrk" => {
            let k = FormParams::need(p.k, "k", name)?;
            let r = FormParams::need(p.r, "r", name)?;
            let a: Vec<TPoly> = jrk_coefficients(r)?.into_iter().map(t_int).collect();
            drx_form(k, &a)?
        }
        "h" => {
            let m = FormParams::need(p.m, "m", name)?;
            let a = FormParams::need(p.a, "a", name)?;
            let om: &[i64] = &[1, -1];
            let g: &[i64] = &[1, -1, -1];
            let d2: &[i64] = &[1, -2, 2, -2];
            let d3: &[i64] = &[1, -2, 2, -3, 4, -4];
            let qq: &[i64] = &[1, -1, 1];
            let e4: &[i64] = &[1, 0, -1, 0, 2];
            let f4: &[i64] = &[1, -1, 2, -2, 2];
            let (num, den) = match (m, a) {
                (2, 0) => (prod(&[&[0, 0, 0, 1], &[1, 0, -2]]), prod(&[om, g, d2])),
                (2, 1) => (xt(&[1, 0, 2]), xt(d2)),
                (3, 0) => (prod(&[&[0, 0, 0, 0, 0, 2], &[1, 0, -2]]), prod(&[om, g, d3])),
                (3, 1) => (xt(&[1, -2, 4, -6, 8, -10, 8, -6]), prod(&[om, qq, d3])),
                (3, 2) => (prod(&[&[0, 0, 0, 1], &[1, 0, 0, 0, 2]]), prod(&[om, qq, d3])),
                (4, 0) => {
                    (prod(&[&[0, 0, 0, 0, 0, 0, 1], &[1, 0, -2], &[1, 0, -3, 4, -4]]), prod(&[om, g, e4, d2, d2]))
                }
                (4, 1) => (xt(&[1, -2, 5, -8, 10, -12, 8, -6]), prod(&[om, d2, f4])),
                (4, 2) => (prod(&[&[0, 0, 0, 1], &[1, 0, 1], &[1, 0, -2]]), prod(&[e4, d2, d2])),
                (4, 3) => (prod(&[&[0, 0, 0, 0, 0, 2], &[1, 0, 1]]), prod(&[om, d2, f4])),
                _ => return invalid(format!("no printed H_{{m,a}} for (m, a) = ({m}, {a})")),
            };
            TForm::new(num, den)?
        }
        "h-k21" => {
            let k = FormParams::need(p.k, "k", name)?;
            if k < 2 {
                return invalid("h-k21 needs k >= 2");
            }
            let num = &XTPoly::one() + &xmono(t_int(2), k);
            let den = &(&(&XTPoly::one() - &xmono(t_int(2), 1)) + &xmono(t_int(2), k)) - &xmono(t_int(2), k + 1);
            TForm::new(num, den)?
        }
        "h-k31" => match FormParams::need(p.k, "k", name)? {
            2 => TForm::from_i64s(&[1, -2, 4, -6, 8, -10, 8, -6], &[1, -4, 8, -12, 16, -20, 19, -12, 4])?,
            3 => TForm::from_i64s(
                &[1, -2, 0, 4, -6, 0, 8, -10, 0, 8, -6],
                &[1, -4, 4, 4, -12, 8, 8, -20, 11, 8, -12, 4],
            )?,
            k => return invalid(format!("no printed H^(k)_{{3,1}} for k = {k}")),
        },
        "phi" => {
            let i = FormParams::need(p.i, "i", name)?;
            let b = FormParams::need(p.b, "b", name)?;
            if i < 2 || b < 2 {
                return invalid("phi needs i >= 2 and b >= 2");
            }
            let den = &(&XTPoly::one() - &xmono(t_int(i as i64), 1)) + &xmono(t_int(i as i64 - 1), b);
            TForm::new(XTPoly::one(), den)?
        }
        "gens" => {
            let k = FormParams::need(p.k, "k", name)?;
            if k < 2 {
                return invalid("gens needs k >= 2");
            }
            // (1+t^2)x + 2t^{k+1}x^{k+1} / (1 - t^{k-1}(1+t^2)x^k)
            let c = &t.pow(k as u32 - 1) * &(&one + &t2);
            let den = &XTPoly::one() - &xmono(c, k);
            let lin = xmono(&one + &t2, 1);
            let num = &(&lin * &den) + &xmono(&t_int(2) * &t.pow(k as u32 + 1), k + 1);
            TForm::new(num, den)?
        }
        _ => return invalid(format!("unknown closed form {name:?}; known: {}", CATALOG.join(", "))),
    };
    Ok(match p.t {
        Some(v) if form.is_symbolic() => form.at_t(&BigInt::from(v)),
        _ => form,
    })
}

/// Whether the numerator is the even part of the denominator.
pub fn check_even_part(form: &TForm) -> Result<bool> {
    if form.is_symbolic() {
        return invalid("even-part check needs integer coefficients");
    }
    let den = form.den();
    let even = Poly::new((0..den.len()).map(|i| if i % 2 == 0 { den.coeff(i) } else { TPoly::zero() }).collect());
    Ok(*form.num() == even)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DrxReport {
    pub r: usize,
    /// `a_1, a_2, ...` read from each fit, by `k`.
    pub per_k: Vec<(usize, Vec<TPoly>)>,
    /// Largest `j` with `a_{2j+1} != 0`, when every fit agrees.
    pub m: Option<usize>,
    pub violations: Vec<String>,
}

impl DrxReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compare fitted `J_r^{(k)}` for several `k` against the conjectured
/// shared shape. Violations are reported, never raised.
pub fn check_drx_pattern(fits: &[(usize, TForm)], r: usize) -> Result<DrxReport> {
    let mut ks: Vec<usize> = fits.iter().map(|(k, _)| *k).collect();
    ks.sort_unstable();
    ks.dedup();
    if ks.len() < 3 {
        return invalid("the pattern check needs fits for at least three distinct k");
    }
    if ks[0] < 2 {
        return invalid("k >= 2");
    }
    let mut violations = Vec::new();
    let mut per_k = Vec::new();
    for (k, f) in fits {
        let k = *k;
        let den = f.den();
        let num = f.num();
        let mut a: Vec<TPoly> = Vec::new();
        for (e, c) in den.coeffs().iter().enumerate().skip(1) {
            if c.is_zero() {
                continue;
            }
            let (j, s) = (e / k, e % k);
            if s > 1 {
                violations.push(format!("k={k}: denominator has x^{e} outside {{jk, jk+1}}"));
                continue;
            }
            let idx = 2 * j + s;
            if a.len() < idx {
                a.resize(idx, TPoly::zero());
            }
            a[idx - 1] = c.clone();
        }
        for e in 0..num.len().max(den.len()) {
            let want = if e % k == 0 { den.coeff(e) } else { TPoly::zero() };
            if num.coeff(e) != want {
                violations.push(format!("k={k}: numerator coefficient of x^{e} is not the matching denominator term"));
                break;
            }
        }
        let at1: Vec<BigInt> = a.iter().map(|c| c.eval(&BigInt::one())).collect();
        match at1.iter().rposition(|v| !v.is_zero()) {
            Some(j) if (j + 1) % 2 == 1 => {}
            Some(j) => violations.push(format!("k={k}: largest index with a_j(1) != 0 is {} (even)", j + 1)),
            None => violations.push(format!("k={k}: denominator is constant")),
        }
        per_k.push((k, a));
    }
    let trimmed: Vec<&[TPoly]> = per_k.iter().map(|(_, a)| a.as_slice()).collect();
    for (i, (k, a)) in per_k.iter().enumerate().skip(1) {
        if trimmed[i] != trimmed[0] {
            violations.push(format!("a-coefficients at k={k} differ from those at k={}: {a:?}", per_k[0].0));
        }
    }
    let m = if violations.is_empty() { per_k.first().map(|(_, a)| (a.len().max(1) - 1) / 2) } else { None };
    Ok(DrxReport { r, per_k, m, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn int_series(f: &TForm, n: usize) -> Vec<i64> {
        f.series(n).iter().map(|c| i64::try_from(c.at_zero()).unwrap()).collect()
    }

    /// Catalan numbers by the convolution recurrence.
    fn catalan(n: usize) -> Vec<BigInt> {
        let mut c = vec![BigInt::one()];
        for i in 1..n {
            let s: BigInt = (0..i).map(|j| &c[j] * &c[i - 1 - j]).sum();
            c.push(s);
        }
        c
    }

    #[test]
    fn expand_known_forms() {
        let f = closed_form("thm1", &FormParams::default()).unwrap();
        assert_eq!(int_series(&f, 6), vec![1, 2, 4, 10, 24, 60]);
        let ones = TForm::from_i64s(&[1], &[1, -1]).unwrap();
        assert_eq!(int_series(&ones, 3), vec![1, 1, 1]);
        assert!(series_expand(&xt(&[1]), &xt(&[0, 1]), 3).is_err());
        let phi = closed_form("phi", &FormParams { i: Some(2), b: Some(3), ..Default::default() }).unwrap();
        assert_eq!(phi, TForm::from_i64s(&[1], &[1, -2, 0, 1]).unwrap());
    }

    #[test]
    fn fits() {
        let v2 = ints(&int_series(&closed_form("thm1", &FormParams::default()).unwrap(), 21));
        let fit = guess_integers(&v2, &GuessOptions::default()).unwrap().unwrap();
        assert_eq!(fit.form, QForm::from_i64s(&[1, 0, -2], &[1, -2, -2, 2]).unwrap());
        assert_eq!(fit.form.to_string(), "(1 - 2x^2) / (1 - 2x - 2x^2 + 2x^3)");
        // no denominator of degree <= 2 fits
        assert!(guess_integers(&v2, &GuessOptions::new(2, 0, 6)).unwrap().is_none());
        let ones = vec![BigInt::one(); 12];
        let fit = guess_integers(&ones, &GuessOptions::new(3, 0, 6)).unwrap().unwrap();
        assert_eq!(fit.form, QForm::from_i64s(&[1], &[1, -1]).unwrap());
        assert!(guess_integers(&catalan(12), &GuessOptions::new(3, 0, 6)).unwrap().is_none());
    }

    #[test]
    fn term_policy() {
        let ones = vec![BigInt::one(); 10];
        assert!(guess_integers(&ones, &GuessOptions::new(5, 0, 6)).is_err());
        let fit = guess_integers(&ones, &GuessOptions::new(5, 0, 6).clamped()).unwrap().unwrap();
        assert_eq!(fit.den_max_used, 2);
    }

    #[test]
    fn integer_primitive_form() {
        let f = QForm::from_i64s(&[2, 4], &[-2, 6]).unwrap();
        let (n, d) = f.integer_primitive();
        assert_eq!((n, d), (TPoly::from_i64s(&[-1, -2]), TPoly::from_i64s(&[1, -3])));
        assert_eq!(f.to_json(), json!({"num": ["-1", "-2"], "den": ["1", "-3"]}));
    }

    #[test]
    fn vk2n_reduces_to_thm1() {
        let a = closed_form("vk2n", &FormParams::k(2).with_t(1)).unwrap().to_qform().unwrap();
        let b = closed_form("thm1", &FormParams::default()).unwrap().to_qform().unwrap();
        assert_eq!(a, b);
        let s = closed_form("thm1t", &FormParams::default()).unwrap();
        let v = closed_form("vk2n", &FormParams::k(2)).unwrap();
        assert_eq!(s.to_symform().unwrap(), v.to_symform().unwrap());
    }

    #[test]
    fn h_k_forms_agree_with_printed_h() {
        let a = closed_form("h-k31", &FormParams::k(2)).unwrap().to_qform().unwrap();
        let b =
            closed_form("h", &FormParams { m: Some(3), a: Some(1), ..Default::default() }).unwrap().to_qform().unwrap();
        assert_eq!(a, b);
        let a = closed_form("h-k21", &FormParams::k(2)).unwrap().to_qform().unwrap();
        let b =
            closed_form("h", &FormParams { m: Some(2), a: Some(1), ..Default::default() }).unwrap().to_qform().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn jrk_at_two_is_j() {
        for r in 2..=7 {
            let a = closed_form("jrk", &FormParams::k(2).with_r(r)).unwrap();
            let b = closed_form("j", &FormParams::default().with_r(r)).unwrap();
            assert_eq!(a.to_qform().unwrap(), b.to_qform().unwrap(), "r={r}");
        }
        let v = closed_form("v3k", &FormParams::k(2).with_t(1)).unwrap().to_qform().unwrap();
        assert_eq!(v, closed_form("j", &FormParams::default().with_r(3)).unwrap().to_qform().unwrap());
    }

    #[test]
    fn even_parts() {
        for r in 3..=7 {
            assert!(check_even_part(&closed_form("j", &FormParams::default().with_r(r)).unwrap()).unwrap());
        }
        // 1 is the even part of 1 - x
        assert!(check_even_part(&TForm::from_i64s(&[1], &[1, -1]).unwrap()).unwrap());
        assert!(!check_even_part(&TForm::from_i64s(&[1, 1], &[1, -1]).unwrap()).unwrap());
        assert!(!check_even_part(&closed_form("stern-u2", &FormParams::default()).unwrap()).unwrap());
    }

    #[test]
    fn drx_patterns() {
        let fits: Vec<(usize, TForm)> =
            (2..=5).map(|k| (k, closed_form("vk2n", &FormParams::k(k).with_t(1)).unwrap())).collect();
        let rep = check_drx_pattern(&fits, 2).unwrap();
        assert!(rep.holds(), "{rep:?}");
        assert_eq!(rep.m, Some(1));
        let fits: Vec<(usize, TForm)> =
            (2..=4).map(|k| (k, closed_form("jrk", &FormParams::k(k).with_r(4)).unwrap())).collect();
        let rep = check_drx_pattern(&fits, 4).unwrap();
        assert!(rep.holds());
        assert_eq!(rep.m, Some(2));
        assert_eq!(rep.per_k[0].1, [-2, -7, 0, -2, 2].map(t_int).to_vec());
        let mut bad = fits.clone();
        let den = &bad[1].1.den().clone() + &xmono(t_int(1), 2);
        bad[1].1 = TForm::new(bad[1].1.num().clone(), den).unwrap();
        assert!(!check_drx_pattern(&bad, 4).unwrap().holds());
        assert!(check_drx_pattern(&fits[..2], 4).is_err());
    }

    #[test]
    fn symbolic_vk2n_has_k_dependent_coefficients() {
        let fits: Vec<(usize, TForm)> = (2..=4).map(|k| (k, closed_form("vk2n", &FormParams::k(k)).unwrap())).collect();
        let rep = check_drx_pattern(&fits, 2).unwrap();
        assert!(!rep.holds());
        assert!(rep.violations.iter().all(|v| v.contains("differ")));
    }

    #[test]
    fn symbolic_fit() {
        let f = closed_form("thm1t", &FormParams::default()).unwrap();
        let data = f.series(14);
        let fit = guess_symbolic(&data, &GuessOptions::new(4, 0, 4)).unwrap().unwrap();
        assert_eq!(fit.form, f.to_symform().unwrap());
    }

    #[test]
    fn unknown_form() {
        assert!(closed_form("nope", &FormParams::default()).is_err());
        assert!(closed_form("vk2n", &FormParams::default()).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(num in proptest::collection::vec(-5i64..=5, 1..4), den in proptest::collection::vec(-4i64..=4, 1..4)) {
            let mut d = vec![1i64];
            d.extend(den);
            let f = TForm::from_i64s(&num, &d).unwrap();
            let data: Vec<BigInt> = f.series(20).iter().map(|c| c.at_zero()).collect();
            if let Some(fit) = guess_integers(&data, &GuessOptions::new(4, 1, 6)).unwrap() {
                let back: Vec<BigRational> = fit.form.series(20);
                prop_assert_eq!(back, data.iter().map(q).collect::<Vec<_>>());
            }
        }

        #[test]
        fn scale_equivariant(c in 1i64..=7, neg in any::<bool>()) {
            let c = if neg { -c } else { c };
            let base = int_series(&closed_form("j", &FormParams::default().with_r(3)).unwrap(), 16);
            let scaled: Vec<BigInt> = base.iter().map(|v| BigInt::from(v * c)).collect();
            let f0 = guess_integers(&ints(&base), &GuessOptions::new(4, 0, 6)).unwrap().unwrap().form;
            let f1 = guess_integers(&scaled, &GuessOptions::new(4, 0, 6)).unwrap().unwrap().form;
            prop_assert_eq!(f1.den(), f0.den());
            prop_assert_eq!(f1.num().clone(), f0.num().scale(&BigRational::from_integer(c.into())));
        }
    }
}
