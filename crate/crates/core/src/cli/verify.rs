//! Named cross-checks of the proved statements.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};

use super::report::{big, bigs, first_diff, mismatch, run_timed, CheckParams, CheckReport, Outcome};
use crate::error::{invalid, Result};
use crate::guess::{closed_form, guess_integers, FormParams, GuessOptions, TForm};
use crate::monoid::{
    check_generator_census, count_factorizations, enumerate_elements, transfer_check, u_star, word_classes,
};
use crate::polynomials::{
    build_product, build_product_with, check_run_structure, golden_series, run_decomposition, CoeffPoly, Limits,
    ProductSpec,
};
use crate::sequences::{RecurrentSeq, SentinelConvention};
use crate::stats::{coefficient_value_predicate, corr_series, integer_values, CorrSpec};
use crate::symfun::{
    verify_forgotten_expansion, verify_powersum_expansion, verify_powersum_expansion_with, ExpansionReport,
    SeedConvention,
};
use crate::triangle::{
    build_poset, charpoly, flag_vectors, frontier_grow, m_matrix, q2, sigma_labels, triangle_rows, upho_check,
    verify_m_recurrence, Monotone,
};
use crate::TPoly;

type Body = fn(&CheckParams, &mut Outcome) -> Result<()>;

pub struct CheckDef {
    pub name: &'static str,
    pub about: &'static str,
    body: Body,
}

pub const VERIFY: &[CheckDef] = &[
    CheckDef {
        name: "thm1",
        about: "sum of squared coefficients of I_n against its rational form, and refit",
        body: thm1,
    },
    CheckDef { name: "thm1t", about: "the same with symbolic t", body: thm1t },
    CheckDef { name: "vk2n", about: "squared-coefficient sums of the k-bonacci products, symbolic t", body: vk2n },
    CheckDef { name: "hnfn", about: "grouped triangle rows equal product coefficients, symbolic t", body: hnfn },
    CheckDef { name: "m-recurrence", about: "mark vectors follow the 7x7 matrix", body: m_recurrence },
    CheckDef { name: "q2", about: "characteristic polynomial of the mark matrix", body: q2_check },
    CheckDef { name: "sigma-labels", about: "edge labelling of the triangle poset", body: sigma },
    CheckDef { name: "flag-beta", about: "flag f- and h-vector of the triangle poset", body: flag_beta },
    CheckDef { name: "runs", about: "run structure of the golden product", body: runs },
    CheckDef { name: "golden", about: "golden product coefficients equal those of I_n", body: golden },
    CheckDef { name: "phi-rgf", about: "frontier posets: ranks, rank steps and row products", body: phi_rgf },
    CheckDef { name: "upho", about: "upper sets of low elements look like the whole poset", body: upho },
    CheckDef { name: "ep-powersum", about: "power-sum expansion of the flag symmetric function", body: ep_powersum },
    CheckDef {
        name: "ep-forgotten",
        about: "forgotten-basis expansion of the flag symmetric function",
        body: ep_forgotten,
    },
    CheckDef { name: "freegen", about: "unique factorization and counts in the balanced-word monoid", body: freegen },
    CheckDef { name: "transfer", about: "product, transfer series and closed form agree", body: transfer },
    CheckDef { name: "zhao", about: "coefficients of prod (1 - x^{F_{i+1}}) are 0 or +-1", body: zhao },
    CheckDef { name: "v2m1", about: "refit the t = -1 squared-coefficient sums", body: v2m1 },
    CheckDef { name: "wordclasses", about: "word classes under baa <-> abb", body: wordclasses },
    CheckDef { name: "stern-u2", about: "squared coefficients of Stern's product", body: stern_u2 },
    CheckDef {
        name: "exercise-note",
        about: "nonzero coefficients depend only on n across seeds",
        body: exercise_note,
    },
];

pub fn names() -> Vec<&'static str> {
    VERIFY.iter().map(|c| c.name).collect()
}

pub fn find(name: &str) -> Option<&'static CheckDef> {
    VERIFY.iter().find(|c| c.name == name)
}

pub fn run_check(name: &str, params: &CheckParams) -> Result<CheckReport> {
    let Some(def) = find(name) else {
        return invalid(format!("unknown check {name:?}; known: {}", names().join(", ")));
    };
    run_timed(def.name, |o| (def.body)(params, o))
}

/// Every registered check, spread over the available cores; results keep
/// registry order.
pub fn run_all(params: &CheckParams) -> Vec<(&'static str, Result<CheckReport>)> {
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(VERIFY.len());
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<CheckReport>>>> = Mutex::new((0..VERIFY.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(def) = VERIFY.get(i) else { break };
                let r = run_check(def.name, params);
                slots.lock().expect("result slots")[i] = Some(r);
            });
        }
    });
    let slots = slots.into_inner().expect("result slots");
    VERIFY.iter().zip(slots).map(|(d, r)| (d.name, r.expect("every check ran"))).collect()
}

fn lim(p: &CheckParams) -> Limits {
    p.limits_or(Limits::from_env())
}

fn opts(p: &CheckParams, den_max: usize) -> GuessOptions {
    GuessOptions::new(p.den_max.unwrap_or(den_max), 0, p.holdout.unwrap_or(6))
}

fn t_sym() -> TPoly {
    TPoly::var()
}

fn t_int(v: i64) -> TPoly {
    TPoly::constant(v.into())
}

/// Compare data with the series of `form`; records the first mismatch.
pub(crate) fn expect_series(o: &mut Outcome, label: &str, data: &[TPoly], form: &TForm) -> bool {
    let want = form.series(data.len());
    match first_diff(data, &want) {
        None => true,
        Some(n) => {
            let mut c = mismatch(n, data[n].render("t"), want[n].render("t"));
            c["sequence"] = Value::String(label.to_string());
            o.fail(c);
            false
        }
    }
}

/// Refit integer data and require the reduced fit to equal `form`.
pub(crate) fn expect_refit(
    o: &mut Outcome,
    label: &str,
    data: &[BigInt],
    form: &TForm,
    g: &GuessOptions,
) -> Result<bool> {
    let want = form.to_qform()?.reduce()?;
    match guess_integers(data, g)? {
        None => {
            o.fail(json!({ "sequence": label, "fit": null, "expected": want.to_string() }));
            Ok(false)
        }
        Some(fit) => {
            let got = fit.form.reduce()?;
            if got != want {
                o.fail(json!({ "sequence": label, "fit": got.to_string(), "expected": want.to_string() }));
                return Ok(false);
            }
            o.detail("fit", got.to_string());
            Ok(true)
        }
    }
}

fn square_sums(spec: &ProductSpec, r: u32, n: usize, l: &Limits) -> Result<Vec<TPoly>> {
    corr_series(spec, &CorrSpec::power(r)?, n, l)
}

fn thm1(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let n = p.nmax.unwrap_or(25);
    o.param("nmax", n);
    let data = square_sums(&ProductSpec::fibonacci(n), 2, n, &lim(p))?;
    let form = closed_form("thm1", &FormParams::default())?;
    if !expect_series(o, "v2", &data, &form) {
        return Ok(());
    }
    let ints = integer_values(&data)?;
    o.detail("head", bigs(&ints[..ints.len().min(8)]));
    if expect_refit(o, "v2", &ints, &form, &opts(p, 6))? {
        o.detail("summary", format!("v2(0..={n}) matches {form}"));
    }
    Ok(())
}

fn thm1t(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let n = p.nmax.unwrap_or(16);
    o.param("nmax", n);
    let data = square_sums(&ProductSpec::kbonacci(2, t_sym(), n)?, 2, n, &lim(p))?;
    let form = closed_form("thm1t", &FormParams::default())?;
    if expect_series(o, "v2(t)", &data, &form) {
        o.detail("summary", format!("v2,t(0..={n}) matches {form}"));
    }
    Ok(())
}

fn vk2n(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let n = p.nmax.unwrap_or(16);
    let kmax = p.kmax.unwrap_or(5);
    o.param("nmax", n);
    o.param("kmax", kmax);
    for k in 2..=kmax {
        let data = square_sums(&ProductSpec::kbonacci(k, t_sym(), n)?, 2, n, &lim(p))?;
        let form = closed_form("vk2n", &FormParams::k(k))?;
        if !expect_series(o, &format!("v2^({k})(t)"), &data, &form) {
            return Ok(());
        }
    }
    let at_one = closed_form("vk2n", &FormParams::k(2).with_t(1))?.to_qform()?.reduce()?;
    let thm = closed_form("thm1", &FormParams::default())?.to_qform()?.reduce()?;
    if at_one != thm {
        o.fail(json!({ "reduction": at_one.to_string(), "expected": thm.to_string() }));
        return Ok(());
    }
    o.detail("summary", format!("k = 2..={kmax}, n <= {n}; k = 2, t = 1 reduces to {thm}"));
    Ok(())
}

fn hnfn(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let n = p.nmax.unwrap_or(20);
    o.param("nmax", n);
    let rows = triangle_rows(n, &t_sym(), &lim(p))?;
    let widths: Vec<usize> = rows.iter().map(|r| r.visible_len()).collect();
    o.detail("row_lengths", widths);
    o.detail("summary", format!("rows 1..={n} equal the coefficients of I_n,t"));
    Ok(())
}

fn m_recurrence(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let n = p.nmax.unwrap_or(20);
    o.param("nmax", n);
    let rep = verify_m_recurrence(n, &lim(p))?;
    o.detail("charpoly", rep.charpoly.render("x"));
    if let Some(&m) = rep.mismatches.first() {
        o.fail(json!({ "n": m, "what": "v(n+1) != M v(n)" }));
    } else if let Some(&m) = rep.square_sum_mismatches.first() {
        o.fail(json!({ "n": m, "what": "A1 + A2 + A3 != v2(n)" }));
    } else if !rep.charpoly_matches {
        o.fail(json!({ "charpoly": rep.charpoly.render("x"), "expected": q2().render("x") }));
    } else {
        o.detail("summary", format!("v(n+1) = M v(n) for 1 <= n < {n}"));
    }
    Ok(())
}

fn q2_check(_: &CheckParams, o: &mut Outcome) -> Result<()> {
    let cp = charpoly(&m_matrix())?;
    let factored =
        &(&TPoly::from_i64s(&[0, 0, 1]) * &TPoly::from_i64s(&[1, 2, 1])) * &TPoly::from_i64s(&[2, -2, -2, 1]);
    o.detail("charpoly", cp.render("x"));
    if cp != q2() || cp != factored {
        o.fail(json!({ "charpoly": cp.render("x"), "expected": factored.render("x") }));
    } else {
        o.detail("summary", "charpoly(M) = x^2 (x+1)^2 (x^3 - 2x^2 - 2x + 2)");
    }
    Ok(())
}

fn is_subsequence(a: &[u64], b: &[u64]) -> bool {
    let mut it = b.iter();
    a.iter().all(|x| it.any(|y| y == x))
}

fn sigma(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let n = p.nmax.unwrap_or(13);
    let depth = p.depth.unwrap_or(n.saturating_sub(1)).min(n);
    o.param("nmax", n);
    o.param("depth", depth);
    let slice = build_poset(n, &lim(p))?;
    let rep = sigma_labels(&slice);
    let valid: Vec<String> = rep
        .candidates
        .iter()
        .filter(|c| c.valid())
        .map(|c| format!("flip_even={} flip_odd={}", c.orientation.flip_even, c.orientation.flip_odd))
        .collect();
    o.detail("valid_orientations", valid);
    let Some(sel) = rep.selected else {
        o.fail("no orientation gives a bijective labelling with subset-sum chain counts");
        return Ok(());
    };
    o.detail("selected", format!("flip_even={} flip_odd={}", sel.flip_even, sel.flip_odd));
    for m in 0..depth {
        if !is_subsequence(&rep.sequences[m], &rep.sequences[m + 1]) {
            o.fail(json!({ "n": m, "what": "S(n) is not a subsequence of S(n+1)" }));
            return Ok(());
        }
    }
    o.detail("nested_reversed", rep.nested_reversed);
    let dirs: Vec<Value> = rep
        .prec_directions
        .iter()
        .map(|(c, _)| {
            let d = rep.prec_consistent(*c).map(|m| format!("{m:?}")).unwrap_or_else(|| "mixed".into());
            json!({ "odd": c.odd, "beyond": c.beyond, "direction": d })
        })
        .collect();
    o.detail("prec_directions", dirs);
    match rep.prec_consistent(SentinelConvention::default()) {
        Some(Monotone::Increasing) | Some(Monotone::Decreasing) => {
            o.detail("summary", format!("labels bijective for n <= {n}; S(n) nested for n <= {depth}"))
        }
        _ => o.fail("S(n) is not monotone under the default sentinel convention"),
    }
    Ok(())
}

fn flag_beta(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let depth = p.depth.unwrap_or(8).max(6);
    o.param("depth", depth);
    let slice = build_poset(depth, &lim(p))?;
    let b12 = flag_vectors(&slice.poset, &[1, 2])?.beta;
    o.detail("beta_1_2", big(&b12));
    if b12 != BigInt::from(-1) {
        o.fail(json!({ "set": [1, 2], "beta": big(&b12), "expected": -1 }));
        return Ok(());
    }
    for mask in 1u32..(1 << 6) {
        let s: Vec<usize> = (0..6).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
        let f = flag_vectors(&slice.poset, &s)?;
        if f.alpha_chains != f.alpha_product {
            o.fail(json!({ "set": s, "chains": big(&f.alpha_chains), "product": big(&f.alpha_product) }));
            return Ok(());
        }
    }
    o.detail("summary", "beta(1,2) = -1; alpha(S) = q_{r1} q_{r2-r1} ... for all S in {1..6}");
    Ok(())
}

fn runs(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let n = p.nmax.unwrap_or(18);
    o.param("nmax", n);
    for m in 1..=n {
        let g = golden_series(m);
        let rs = run_decomposition(&g)?;
        check_run_structure(m, &rs)?;
    }
    o.detail("summary", format!("run lengths 2 or 3, F_(n+1) runs, floor formula and symmetry for n <= {n}"));
    Ok(())
}

fn i_coefficients(n: usize, l: &Limits) -> Result<Vec<BigInt>> {
    let p: CoeffPoly<BigInt> = build_product(&ProductSpec::fibonacci(n), l)?;
    Ok(p.to_dense_vec())
}

fn golden(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let n = p.nmax.unwrap_or(16);
    o.param("nmax", n);
    for m in 0..=n {
        let g = golden_series(m).coefficients();
        let i = i_coefficients(m, &lim(p))?;
        if g != i {
            let at = first_diff(&g, &i).unwrap_or(g.len().min(i.len()));
            o.fail(json!({ "n": m, "position": at, "golden_terms": g.len(), "product_terms": i.len() }));
            return Ok(());
        }
    }
    o.detail("summary", format!("coefficient sequences agree for n <= {n}"));
    Ok(())
}

fn phi_rgf(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let n = p.nmax.unwrap_or(14);
    o.param("nmax", n);
    let l = lim(p);
    for (i, b) in [(2usize, 2usize), (2, 3), (3, 2), (3, 3)] {
        let f = frontier_grow(i, b, n, &l)?;
        let fp = FormParams { i: Some(i), b: Some(b), ..FormParams::default() };
        let want = closed_form("phi", &fp)?.series(n + 1);
        let got: Vec<TPoly> = f.q.iter().map(|q| TPoly::constant(q.clone())).collect();
        if let Some(m) = first_diff(&got, &want) {
            o.fail(json!({ "i": i, "b": b, "n": m, "q": big(&f.q[m]), "expected": want[m].render("t") }));
            return Ok(());
        }
        if (i, b) == (3, 2) {
            for m in 1..=n {
                let s: CoeffPoly<BigInt> = build_product(&ProductSpec::stern(m), &l)?;
                if s.to_dense_vec() != f.rows[m] {
                    o.fail(json!({ "i": 3, "b": 2, "n": m, "what": "row differs from Stern's triangle" }));
                    return Ok(());
                }
            }
        }
        if (i, b) == (2, 3) {
            for m in 1..=n {
                if i_coefficients(m, &l)? != f.rows[m] {
                    o.fail(json!({ "i": 2, "b": 3, "n": m, "what": "row differs from the Fibonacci triangle" }));
                    return Ok(());
                }
            }
        }
    }
    o.detail("summary", format!("(2,2), (2,3), (3,2), (3,3) for n <= {n}; (3,2) rows are Stern's"));
    Ok(())
}

fn upho(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let depth = p.depth.unwrap_or(4);
    o.param("depth", depth);
    let l = lim(p);
    let tri = build_poset(depth + 2, &l)?;
    let rep = upho_check(&tri.poset, depth)?;
    o.detail("checked", rep.checked);
    o.detail("non_planar_matches", rep.non_planar_matches);
    if let Some(&(r, k)) = rep.failures.first() {
        o.fail(json!({ "poset": "F", "rank": r, "index": k }));
        return Ok(());
    }
    for (i, b) in [(2, 2), (3, 2), (3, 3)] {
        let f = frontier_grow(i, b, depth + 2, &l)?;
        let rep = upho_check(&f.poset, depth)?;
        if let Some(&(r, k)) = rep.failures.first() {
            o.fail(json!({ "poset": format!("P_{i}{b}"), "rank": r, "index": k }));
            return Ok(());
        }
    }
    o.detail("summary", format!("upper sets of ranks 0..=2 match to depth {depth}"));
    Ok(())
}

const EP_PAIRS: [(u32, u32); 3] = [(2, 2), (2, 3), (3, 2)];

fn expansion_failure(r: &ExpansionReport) -> Value {
    let m = &r.mismatches[0];
    json!({
        "i": r.i, "b": r.b, "partition": format!("{:?}", m.partition),
        "computed": m.actual.to_string(), "expected": m.expected.to_string(),
    })
}

fn ep_powersum(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let d = p.depth.unwrap_or(6) as u32;
    o.param("degree", d);
    let mut seeds = Vec::new();
    for (i, b) in EP_PAIRS {
        let r = verify_powersum_expansion(i, b, d)?;
        if !r.passed() {
            o.fail(expansion_failure(&r));
            return Ok(());
        }
        let z = verify_powersum_expansion_with(i, b, d, SeedConvention::ZeroSeed)?;
        let first = z.mismatches.first().map(|m| format!("{:?}", m.partition));
        seeds.push(json!({ "i": i, "b": b, "power_sum_seed": "pass",
            "zero_seed": if z.passed() { "pass" } else { "fail" }, "zero_seed_first_mismatch": first }));
    }
    o.detail("seed_conventions", seeds);
    o.detail("summary", format!("(2,2), (2,3), (3,2) through degree {d}"));
    Ok(())
}

fn ep_forgotten(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let d = p.depth.unwrap_or(6) as u32;
    o.param("degree", d);
    for (i, b) in EP_PAIRS {
        let r = verify_forgotten_expansion(i, b, d)?;
        if !r.passed() {
            o.fail(expansion_failure(&r));
            return Ok(());
        }
    }
    o.detail("summary", format!("(2,2), (2,3), (3,2) through degree {d}"));
    Ok(())
}

fn freegen(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let n = p.nmax.unwrap_or(12);
    let kmax = p.kmax.unwrap_or(3);
    o.param("nmax", n);
    o.param("kmax", kmax);
    let l = lim(p);
    let mut counts = Vec::new();
    for k in 2..=kmax {
        let v = integer_values(&square_sums(&ProductSpec::kbonacci(k, TPoly::one(), n)?, 2, n, &l)?)?;
        for (m, count) in v.iter().enumerate().skip(1) {
            let words = enumerate_elements(k, 2, m)?;
            if BigInt::from(words.len()) != *count {
                o.fail(mismatch(m, words.len(), count));
                return Ok(());
            }
            if let Some(w) = words.iter().find(|w| count_factorizations(k, w) != 1) {
                o.fail(json!({ "k": k, "n": m, "word": w.to_json(), "factorizations": count_factorizations(k, w) }));
                return Ok(());
            }
        }
        if !check_generator_census(k, n)? {
            o.fail(json!({ "k": k, "what": "generator counts differ from the generator series" }));
            return Ok(());
        }
        counts.push(json!({ "k": k, "elements": bigs(&v) }));
    }
    o.detail("counts", counts);
    o.detail("summary", format!("unique factorization for k = 2..={kmax}, length <= {n}"));
    Ok(())
}

fn transfer(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let n = p.nmax.unwrap_or(16);
    let kmax = p.kmax.unwrap_or(5);
    o.param("nmax", n);
    o.param("kmax", kmax);
    for k in 2..=kmax {
        let rep = transfer_check(k, &t_sym(), n, &lim(p))?;
        if let Some(m) = rep.first_mismatch() {
            o.fail(json!({
                "k": k, "n": m, "transfer": rep.transfer[m].render("t"),
                "product": rep.product[m].render("t"), "closed": rep.closed[m].render("t"),
            }));
            return Ok(());
        }
    }
    o.detail("summary", format!("three-way agreement for k = 2..={kmax}, n <= {n}, symbolic t"));
    Ok(())
}

fn zhao(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let n = p.nmax.unwrap_or(25);
    o.param("nmax", n);
    let l = lim(p);
    let spec = ProductSpec::kbonacci(2, t_int(-1), n)?;
    let allowed = [BigInt::one(), -BigInt::one()].into_iter().collect();
    let mut bad = None;
    build_product_with::<i64>(&spec, &l, |m, poly| {
        if bad.is_none() && !coefficient_value_predicate(poly, &allowed)? {
            bad = Some(m);
        }
        Ok(())
    })?;
    if let Some(m) = bad {
        o.fail(json!({ "n": m, "what": "a coefficient outside {0, 1, -1}" }));
        return Ok(());
    }
    let v2 = square_sums(&spec, 2, n, &l)?;
    let form = closed_form("v2m1", &FormParams::default())?;
    if !expect_series(o, "v2,-1", &v2, &form) {
        return Ok(());
    }
    let v4 = square_sums(&spec, 4, n, &l)?;
    if let Some(m) = first_diff(&v4, &v2) {
        o.fail(mismatch(m, v4[m].render("t"), v2[m].render("t")));
        return Ok(());
    }
    o.detail("summary", format!("coefficients in {{0, 1, -1}} and v4,-1 = v2,-1 for n <= {n}"));
    Ok(())
}

fn v2m1(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let n = p.nmax.unwrap_or(25);
    o.param("nmax", n);
    let data = square_sums(&ProductSpec::kbonacci(2, t_int(-1), n)?, 2, n, &lim(p))?;
    let form = closed_form("v2m1", &FormParams::default())?;
    if expect_series(o, "v2,-1", &data, &form) && expect_refit(o, "v2,-1", &integer_values(&data)?, &form, &opts(p, 6))?
    {
        o.detail("summary", format!("v2,-1(0..={n}) refits to {form}"));
    }
    Ok(())
}

fn wordclasses(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let n = p.nmax.unwrap_or(13);
    o.param("nmax", n);
    let l = lim(p);
    for m in 0..=n {
        let mut coeffs: Vec<BigInt> = i_coefficients(m, &l)?.into_iter().filter(|c| *c != BigInt::from(0)).collect();
        coeffs.sort();
        let classes: Vec<BigInt> = word_classes(m)?.into_iter().map(BigInt::from).collect();
        if classes != coeffs {
            o.fail(json!({ "n": m, "class_sizes": bigs(&classes), "coefficients": bigs(&coeffs) }));
            return Ok(());
        }
    }
    for r in 1..=3u32 {
        let v = integer_values(&square_sums(&ProductSpec::fibonacci(n), r, n, &l)?)?;
        for (m, want) in v.iter().enumerate() {
            let got = u_star(m, r)?;
            if &got != want {
                let mut c = mismatch(m, &got, want);
                c["r"] = json!(r);
                o.fail(c);
                return Ok(());
            }
        }
    }
    o.detail("summary", format!("class sizes equal coefficients and u*_n(r) = v_r(n), r <= 3, n <= {n}"));
    Ok(())
}

fn stern_u2(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let n = p.nmax.unwrap_or(18);
    o.param("nmax", n);
    let data = square_sums(&ProductSpec::stern(n), 2, n, &lim(p))?;
    let form = closed_form("stern-u2", &FormParams::default())?;
    if expect_series(o, "u2", &data, &form) && expect_refit(o, "u2", &integer_values(&data)?, &form, &opts(p, 4))? {
        o.detail("summary", format!("u2(0..={n}) matches {form}"));
    }
    Ok(())
}

pub const EXERCISE_SEEDS: [(i64, i64); 5] = [(1, 2), (2, 1), (2, 3), (3, 5), (1, 4)];

/// First `n <= n_max` where the nonzero coefficients of `prod (1 + x^{f_i})`
/// differ between two seed pairs.
pub fn seed_divergence(a: (i64, i64), b: (i64, i64), n_max: usize, limits: &Limits) -> Result<Option<usize>> {
    let nonzero = |(f1, f2): (i64, i64), m: usize| -> Result<Vec<i64>> {
        let seq = RecurrentSeq::from_i64(&[1, 1], &[f1, f2])?;
        let poly: CoeffPoly<i64> = build_product(&ProductSpec::weighted(seq, 0, TPoly::one(), m), limits)?;
        Ok(poly.nonzero_coefficients())
    };
    for m in 1..=n_max {
        if nonzero(a, m)? != nonzero(b, m)? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

fn exercise_note(p: &CheckParams, o: &mut Outcome) -> Result<()> {
    let n = p.nmax.unwrap_or(14);
    o.param("nmax", n);
    o.param("seeds", EXERCISE_SEEDS.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>());
    let l = lim(p);
    let reference = EXERCISE_SEEDS[0];
    let mut per_seed = Vec::new();
    let mut first_bad = None;
    for seed in &EXERCISE_SEEDS[1..] {
        let d = seed_divergence(reference, *seed, n, &l)?;
        per_seed.push(json!({ "seed": [seed.0, seed.1], "differs_from_n": d }));
        if let (None, Some(m)) = (first_bad, d) {
            first_bad = Some((*seed, m));
        }
    }
    o.detail("seeds_vs_reference", per_seed);
    match first_bad {
        Some((seed, m)) => o.fail(json!({
            "n": m, "seed": [seed.0, seed.1], "reference": [reference.0, reference.1],
            "what": "nonzero-coefficient sequences differ",
        })),
        None => o.detail("summary", format!("identical nonzero-coefficient sequences for n <= {n}")),
    }
    Ok(())
}
