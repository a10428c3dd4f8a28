//! Grouped triangles, their mark statistics, the triangle poset with its
//! edge labelling and flag vectors, and planar upho frontier posets.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, violated, Error, Result};
use crate::polynomials::{build_product_with, CoeffPoly, Limits, ProductSpec};
use crate::ring::TPoly;
use crate::sequences::{fib, prec_compare, RecurrentSeq, SentinelConvention};
use crate::stats::{corr_sum, CorrSpec};

/// One group of a row. Virtual members hold 0 and occupy a slot but no entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Group {
    /// Index of the first visible entry.
    pub start: usize,
    /// Slot count including virtual members; 2 or 3.
    pub len: usize,
    pub leading_virtual: bool,
    pub trailing_virtual: bool,
}

impl Group {
    pub fn visible_len(&self) -> usize {
        self.len - usize::from(self.leading_virtual) - usize::from(self.trailing_virtual)
    }

    /// Visible entry index of each slot, `None` for a virtual member.
    pub fn slots(&self) -> Vec<Option<usize>> {
        let mut next = self.start;
        (0..self.len)
            .map(|j| {
                if (j == 0 && self.leading_virtual) || (j + 1 == self.len && self.trailing_virtual) {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect()
    }

    fn last_visible(&self) -> usize {
        self.start + self.visible_len() - 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupedRow {
    pub n: usize,
    pub entries: Vec<TPoly>,
    pub groups: Vec<Group>,
}

impl GroupedRow {
    pub fn visible_len(&self) -> usize {
        self.entries.len()
    }

    /// Entries as integers; fails for a symbolic row.
    pub fn integer_entries(&self) -> Result<Vec<BigInt>> {
        self.entries
            .iter()
            .enumerate()
            .map(|(k, e)| {
                e.as_integer().ok_or_else(|| Error::InvalidArgument(format!("entry {k} of row {} is symbolic", self.n)))
            })
            .collect()
    }

    /// Groups tile the entries in order; each has 2 or 3 slots and at
    /// least one visible member.
    pub fn check_well_formed(&self) -> Result<()> {
        let mut next = 0;
        for (gi, g) in self.groups.iter().enumerate() {
            if g.len != 2 && g.len != 3 {
                return violated(format!("row {} group {gi} has {} slots", self.n, g.len));
            }
            if g.start != next || g.visible_len() == 0 {
                return violated(format!("row {} group {gi} does not tile the row", self.n));
            }
            if (g.leading_virtual && gi != 0) || (g.trailing_virtual && gi + 1 != self.groups.len()) {
                return violated(format!("row {} has a virtual member inside the row", self.n));
            }
            next += g.visible_len();
        }
        if next != self.entries.len() {
            return violated(format!("row {} groups cover {next} of {} entries", self.n, self.entries.len()));
        }
        Ok(())
    }
}

/// `(1, t)` as a single plain group.
pub fn first_row(t: &TPoly) -> GroupedRow {
    GroupedRow {
        n: 1,
        entries: vec![TPoly::one(), t.clone()],
        groups: vec![Group { start: 0, len: 2, leading_virtual: false, trailing_virtual: false }],
    }
}

#[derive(Clone, Copy, Debug)]
enum Production {
    /// 3-group `(e, b + t e, t b)` below a group end and the next group
    /// start; a missing side is the boundary zero and becomes virtual.
    Pair { left: Option<usize>, right: Option<usize> },
    /// 2-group `(a, t a)` below a middle entry.
    Middle(usize),
}

fn productions(row: &GroupedRow) -> Vec<Production> {
    let mut out = Vec::new();
    let (Some(first), Some(last)) = (row.groups.first(), row.groups.last()) else {
        return out;
    };
    if !first.leading_virtual {
        out.push(Production::Pair { left: None, right: Some(first.start) });
    }
    for (gi, g) in row.groups.iter().enumerate() {
        if gi > 0 {
            let prev = &row.groups[gi - 1];
            out.push(Production::Pair { left: Some(prev.last_visible()), right: Some(g.start) });
        }
        if g.len == 3 {
            out.push(Production::Middle(g.start + 1 - usize::from(g.leading_virtual)));
        }
    }
    if !last.trailing_virtual {
        out.push(Production::Pair { left: Some(last.last_visible()), right: None });
    }
    out
}

/// The next row and, for each new entry, the entries of `row` it is computed from.
fn produce(row: &GroupedRow, t: &TPoly) -> (GroupedRow, Vec<Vec<usize>>) {
    let mut entries = Vec::new();
    let mut groups = Vec::new();
    let mut parents = Vec::new();
    for p in productions(row) {
        let start = entries.len();
        match p {
            Production::Pair { left, right } => {
                let e = left.map(|i| &row.entries[i]);
                let b = right.map(|i| &row.entries[i]);
                if let Some(e) = e {
                    entries.push(e.clone());
                    parents.push(vec![left.unwrap()]);
                }
                let mid = match (e, b) {
                    (Some(e), Some(b)) => b + &(t * e),
                    (Some(e), None) => t * e,
                    (None, Some(b)) => b.clone(),
                    (None, None) => unreachable!("a pair has at least one side"),
                };
                entries.push(mid);
                parents.push(left.into_iter().chain(right).collect());
                if let Some(b) = b {
                    entries.push(t * b);
                    parents.push(vec![right.unwrap()]);
                }
                groups.push(Group {
                    start,
                    len: 3,
                    leading_virtual: left.is_none(),
                    trailing_virtual: right.is_none(),
                });
            }
            Production::Middle(a) => {
                entries.push(row.entries[a].clone());
                entries.push(t * &row.entries[a]);
                parents.push(vec![a]);
                parents.push(vec![a]);
                groups.push(Group { start, len: 2, leading_virtual: false, trailing_virtual: false });
            }
        }
    }
    (GroupedRow { n: row.n + 1, entries, groups }, parents)
}

fn fib_product(t: &TPoly, n: usize) -> ProductSpec {
    ProductSpec::weighted(RecurrentSeq::fibonacci(), 1, t.clone(), n)
}

fn compare_with_product(row: &GroupedRow, p: &CoeffPoly<TPoly>) -> Result<()> {
    let coeffs = p.to_dense_vec();
    let len = coeffs.len().max(row.entries.len());
    for k in 0..len {
        let want = coeffs.get(k).cloned().unwrap_or_else(TPoly::zero);
        let got = row.entries.get(k).cloned().unwrap_or_else(TPoly::zero);
        if want != got {
            return violated(format!("row {} differs from the product at x^{k}: {got} vs {want}", row.n));
        }
    }
    Ok(())
}

/// The row below `row`, checked against the coefficients of the product.
pub fn next_row(row: &GroupedRow, t: &TPoly, limits: &Limits) -> Result<GroupedRow> {
    row.check_well_formed()?;
    let (next, _) = produce(row, t);
    let p = build_product_with::<TPoly>(&fib_product(t, next.n), limits, |_, _| Ok(()))?;
    compare_with_product(&next, &p)?;
    Ok(next)
}

/// Rows `1..=n_max`, each checked against the streamed product.
pub fn triangle_rows(n_max: usize, t: &TPoly, limits: &Limits) -> Result<Vec<GroupedRow>> {
    let mut rows: Vec<GroupedRow> = Vec::with_capacity(n_max);
    build_product_with::<TPoly>(&fib_product(t, n_max), limits, |m, p| {
        if m == 0 {
            return Ok(());
        }
        let row = match rows.last() {
            None => first_row(t),
            Some(prev) => produce(prev, t).0,
        };
        row.check_well_formed()?;
        compare_with_product(&row, p)?;
        rows.push(row);
        Ok(())
    })?;
    Ok(rows)
}

/// Rows with integer `t`, unchecked; used where the product check is done separately.
fn raw_rows(n_max: usize, t: &TPoly) -> Vec<(GroupedRow, Vec<Vec<usize>>)> {
    let mut out: Vec<(GroupedRow, Vec<Vec<usize>>)> = Vec::with_capacity(n_max);
    if n_max == 0 {
        return out;
    }
    out.push((first_row(t), vec![vec![0], vec![0]]));
    for _ in 1..n_max {
        let next = produce(&out.last().unwrap().0, t);
        out.push(next);
    }
    out
}

/// Rows in the bulleted display style: groups separated by `•`, centred.
pub fn show(rows: &[GroupedRow]) -> String {
    let lines: Vec<String> = rows
        .iter()
        .map(|row| {
            row.groups
                .iter()
                .map(|g| {
                    (g.start..g.start + g.visible_len())
                        .map(|k| row.entries[k].render("t"))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect::<Vec<_>>()
                .join(" \u{2022} ")
        })
        .collect();
    let width = lines.iter().map(|l| l.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for l in lines {
        let pad = (width - l.chars().count()) / 2;
        let _ = writeln!(out, "{}{}", " ".repeat(pad), l);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mark {
    First,
    Middle,
    Last,
}

/// Position of each visible entry within its group, counting virtual slots.
pub fn marks(row: &GroupedRow) -> Vec<Mark> {
    let mut out = vec![Mark::First; row.entries.len()];
    for g in &row.groups {
        for (j, slot) in g.slots().into_iter().enumerate() {
            if let Some(k) = slot {
                out[k] = if j == 0 {
                    Mark::First
                } else if j + 1 == g.len {
                    Mark::Last
                } else {
                    Mark::Middle
                };
            }
        }
    }
    out
}

/// `[A_1, A_2, A_3, A_{3,1}, A_{1,2}, A_{1,3}, A_{2,3}]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AVector(pub [BigInt; 7]);

impl AVector {
    pub fn from_i64s(v: [i64; 7]) -> Self {
        Self(v.map(BigInt::from))
    }

    /// `A_1 + A_2 + A_3`.
    pub fn square_sum(&self) -> BigInt {
        &self.0[0] + &self.0[1] + &self.0[2]
    }
}

pub fn a_vector(row: &GroupedRow) -> Result<AVector> {
    let vals = row.integer_entries()?;
    let mk = marks(row);
    let sel = |k: usize, m: Mark| -> BigInt {
        if k < vals.len() && mk[k] == m {
            vals[k].clone()
        } else {
            BigInt::zero()
        }
    };
    let sq = |m: Mark| (0..vals.len()).map(|k| sel(k, m).pow(2)).sum::<BigInt>();
    let adj = |a: Mark, b: Mark| (0..vals.len()).map(|k| sel(k, a) * sel(k + 1, b)).sum::<BigInt>();
    Ok(AVector([
        sq(Mark::First),
        sq(Mark::Middle),
        sq(Mark::Last),
        adj(Mark::Last, Mark::First),
        adj(Mark::First, Mark::Middle),
        adj(Mark::First, Mark::Last),
        adj(Mark::Middle, Mark::Last),
    ]))
}

/// Transfer matrix of the seven mark sums.
pub const M: [[i64; 7]; 7] = [
    [0, 1, 1, 0, 0, 0, 0],
    [1, 0, 1, 2, 0, 0, 0],
    [1, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 1, 1],
    [0, 0, 1, 1, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0],
    [1, 0, 0, 1, 0, 0, 0],
];

pub fn apply_m(v: &AVector) -> AVector {
    AVector(std::array::from_fn(|i| (0..7).map(|j| BigInt::from(M[i][j]) * &v.0[j]).sum()))
}

/// `det(x I - A)` by the Faddeev-LeVerrier recursion (exact over the integers).
pub fn charpoly(a: &[Vec<BigInt>]) -> Result<TPoly> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return invalid("charpoly needs a square matrix");
    }
    let matmul = |x: &[Vec<BigInt>], y: &[Vec<BigInt>]| -> Vec<Vec<BigInt>> {
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| &x[i][k] * &y[k][j]).sum()).collect()).collect()
    };
    // c[n-k] is the coefficient of x^{n-k}.
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    let mut mk = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        let mut next = matmul(a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        let am = matmul(a, &next);
        let tr: BigInt = (0..n).map(|i| am[i][i].clone()).sum();
        c[n - k] = -tr / BigInt::from(k);
        mk = next;
    }
    Ok(TPoly::new(c))
}

pub fn m_matrix() -> Vec<Vec<BigInt>> {
    M.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// `x^2 (x+1)^2 (x^3 - 2x^2 - 2x + 2)`.
pub fn q2() -> TPoly {
    let x = TPoly::var();
    let x1 = TPoly::from_i64s(&[1, 1]);
    let cubic = TPoly::from_i64s(&[2, -2, -2, 1]);
    &(&(&x * &x) * &(&x1 * &x1)) * &cubic
}

#[derive(Clone, Debug)]
pub struct MReport {
    /// `v(1)..v(n_max)`.
    pub vectors: Vec<AVector>,
    /// `n` with `v(n+1) != M v(n)`.
    pub mismatches: Vec<usize>,
    /// Least `n0` with `v(n+1) = M v(n)` for every checked `n >= n0`.
    pub first_valid: Option<usize>,
    pub charpoly: TPoly,
    pub charpoly_matches: bool,
    /// `n` where `A_1 + A_2 + A_3` differs from the sum of squared coefficients.
    pub square_sum_mismatches: Vec<usize>,
}

impl MReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.charpoly_matches && self.square_sum_mismatches.is_empty()
    }
}

/// Check `v(n+1) = M v(n)` for `1 <= n < n_max`, the characteristic
/// polynomial of `M`, and `A_1 + A_2 + A_3 = v_2(n)`.
pub fn verify_m_recurrence(n_max: usize, limits: &Limits) -> Result<MReport> {
    if n_max < 2 {
        return invalid("n_max must be at least 2");
    }
    let rows = triangle_rows(n_max, &TPoly::one(), limits)?;
    let vectors = rows.iter().map(a_vector).collect::<Result<Vec<_>>>()?;
    let mismatches: Vec<usize> = (1..n_max).filter(|&n| apply_m(&vectors[n - 1]) != vectors[n]).collect();
    let first_valid = match mismatches.last() {
        None => Some(1),
        Some(&n) if n + 1 < n_max => Some(n + 1),
        Some(_) => None,
    };
    let two = CorrSpec::power(2)?;
    let mut square_sum_mismatches = Vec::new();
    let mut n = 0;
    build_product_with::<BigInt>(&ProductSpec::fibonacci(n_max), limits, |m, p| {
        if m >= 1 {
            let v2 = corr_sum(p, &two)?;
            if TPoly::constant(vectors[m - 1].square_sum()) != v2 {
                square_sum_mismatches.push(m);
            }
        }
        n = m;
        Ok(())
    })?;
    debug_assert_eq!(n, n_max);
    let cp = charpoly(&m_matrix())?;
    Ok(MReport { vectors, mismatches, first_valid, charpoly_matches: cp == q2(), charpoly: cp, square_sum_mismatches })
}

/// A ranked DAG: `parents[r][k]` lists the indices at rank `r - 1` covered
/// by element `k` of rank `r`. Rank 0 holds the single bottom element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPoset {
    pub parents: Vec<Vec<Vec<usize>>>,
}

impl GradedPoset {
    pub fn top_rank(&self) -> usize {
        self.parents.len() - 1
    }

    pub fn rank_sizes(&self) -> Vec<usize> {
        self.parents.iter().map(Vec::len).collect()
    }

    /// Number of saturated chains from the bottom to every element.
    pub fn chain_counts(&self) -> Vec<Vec<BigInt>> {
        let mut out: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
        for r in 1..self.parents.len() {
            let prev = &out[r - 1];
            let row = self.parents[r].iter().map(|ps| ps.iter().map(|&p| &prev[p]).sum()).collect();
            out.push(row);
        }
        out
    }

    /// Number of elements covering each element, for ranks below the top.
    pub fn up_degrees(&self) -> Vec<Vec<usize>> {
        (0..self.top_rank())
            .map(|r| {
                let mut d = vec![0; self.parents[r].len()];
                for ps in &self.parents[r + 1] {
                    for &p in ps {
                        d[p] += 1;
                    }
                }
                d
            })
            .collect()
    }

    /// Elements `>= (rank, k)` up to `rank + depth`, by relative rank, in
    /// left-to-right order.
    pub fn upset(&self, rank: usize, k: usize, depth: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![k]];
        let mut inside = vec![false; self.parents[rank].len()];
        inside[k] = true;
        for r in rank + 1..=(rank + depth).min(self.top_rank()) {
            let here: Vec<bool> = self.parents[r].iter().map(|ps| ps.iter().any(|&p| inside[p])).collect();
            out.push(here.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect());
            inside = here;
        }
        out
    }

    /// Hasse diagram as DOT text; `label` names each element.
    pub fn to_dot(&self, name: &str, label: impl Fn(usize, usize) -> String) -> String {
        let mut s = format!("digraph {name} {{\n  rankdir=BT;\n");
        for (r, rank) in self.parents.iter().enumerate() {
            for (k, ps) in rank.iter().enumerate() {
                let _ = writeln!(s, "  r{r}_{k} [label=\"{}\"];", label(r, k));
                for p in ps {
                    let _ = writeln!(s, "  r{}_{p} -> r{r}_{k};", r - 1);
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

/// The triangle poset truncated at rank `n_max`, with its rows.
#[derive(Clone, Debug)]
pub struct PosetSlice {
    pub poset: GradedPoset,
    pub rows: Vec<GroupedRow>,
    pub chains: Vec<Vec<BigInt>>,
}

impl PosetSlice {
    pub fn rank_sizes(&self) -> Vec<usize> {
        self.poset.rank_sizes()
    }

    pub fn to_dot(&self) -> String {
        self.poset.to_dot("F", |r, k| if r == 0 { "0".into() } else { self.rows[r - 1].entries[k].render("t") })
    }
}

/// Poset whose rank-`n` elements are the entries of row `n`, each covering
/// the entries its value is computed from, with a bottom element below row 1.
pub fn build_poset(n_max: usize, limits: &Limits) -> Result<PosetSlice> {
    let mut total: u64 = 1;
    for n in 1..=n_max {
        total += fib(n + 3) - 1;
        limits.check(n, total, 48)?;
    }
    let built = raw_rows(n_max, &TPoly::one());
    let mut parents = vec![vec![Vec::new()]];
    let mut rows = Vec::with_capacity(n_max);
    for (row, ps) in built {
        parents.push(ps);
        rows.push(row);
    }
    let poset = GradedPoset { parents };
    let chains = poset.chain_counts();
    for (r, row) in rows.iter().enumerate() {
        let vals = row.integer_entries()?;
        if vals != chains[r + 1] {
            return violated(format!("chain counts at rank {} differ from row entries", r + 1));
        }
    }
    Ok(PosetSlice { poset, rows, chains })
}

/// Which end each alternating label pattern starts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Orientation {
    /// Edges whose lower rank is even are read from the right.
    pub flip_even: bool,
    /// Edges whose lower rank is odd are read from the right.
    pub flip_odd: bool,
}

impl Orientation {
    pub fn all() -> [Self; 4] {
        [
            Self { flip_even: false, flip_odd: false },
            Self { flip_even: true, flip_odd: true },
            Self { flip_even: true, flip_odd: false },
            Self { flip_even: false, flip_odd: true },
        ]
    }
}

#[derive(Clone, Debug)]
pub struct OrientationResult {
    pub orientation: Orientation,
    /// Every saturated chain to each element has the same label sum.
    pub equal_sums: bool,
    /// Labels at rank `n` are exactly `0..=F_{n+3}-2`.
    pub bijective: bool,
    /// Chain counts equal the number of subsets of `{F_2..F_{n+1}}` summing to the label.
    pub subset_counts: bool,
    /// `S(n)` for ranks `0..=n_max` when sums are equal.
    pub sequences: Option<Vec<Vec<u64>>>,
}

impl OrientationResult {
    pub fn valid(&self) -> bool {
        self.equal_sums && self.bijective && self.subset_counts
    }
}

/// Direction in which a label sequence runs under `prec_compare`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotone {
    Increasing,
    Decreasing,
    Mixed,
}

#[derive(Clone, Debug)]
pub struct SigmaReport {
    pub candidates: Vec<OrientationResult>,
    pub selected: Option<Orientation>,
    /// `S(n)` under the selected orientation.
    pub sequences: Vec<Vec<u64>>,
    /// `S(n)`, left to right, is a subsequence of `S(n+1)` left to right.
    pub nested_same_direction: bool,
    /// `S(n)`, right to left, is a subsequence of `S(n+1)` left to right.
    pub nested_reversed: bool,
    /// Direction of every `S(n)` under each sentinel convention.
    pub prec_directions: Vec<(SentinelConvention, Vec<Monotone>)>,
}

impl SigmaReport {
    /// Whether all ranks run in one common direction under `conv`.
    pub fn prec_consistent(&self, conv: SentinelConvention) -> Option<Monotone> {
        let (_, dirs) = self.prec_directions.iter().find(|(c, _)| *c == conv)?;
        let first = *dirs.first()?;
        (first != Monotone::Mixed && dirs.iter().all(|&d| d == first)).then_some(first)
    }
}

/// Edges between ranks `r-1` and `r` as `(lower, upper)`, left to right.
fn edges(poset: &GradedPoset, r: usize) -> Vec<(usize, usize)> {
    let mut e: Vec<(usize, usize)> =
        poset.parents[r].iter().enumerate().flat_map(|(k, ps)| ps.iter().map(move |&p| (p, k))).collect();
    e.sort_unstable();
    e
}

/// Alternating label pattern of edges above rank `lower`.
fn label_pattern(lower: usize) -> [u64; 2] {
    if lower % 2 == 0 {
        [0, fib(lower + 2)]
    } else {
        [fib(lower + 2), 0]
    }
}

fn sigma_under(poset: &GradedPoset, o: Orientation) -> Option<Vec<Vec<u64>>> {
    let mut sig = vec![vec![0u64]];
    for r in 1..=poset.top_rank() {
        let lower = r - 1;
        let pat = label_pattern(lower);
        let flip = if lower % 2 == 0 { o.flip_even } else { o.flip_odd };
        let es = edges(poset, r);
        let m = es.len();
        let mut s: Vec<Option<u64>> = vec![None; poset.parents[r].len()];
        for (j, &(p, k)) in es.iter().enumerate() {
            let pos = if flip { m - 1 - j } else { j };
            let v = sig[lower][p] + pat[pos % 2];
            match s[k] {
                None => s[k] = Some(v),
                Some(w) if w != v => return None,
                Some(_) => {}
            }
        }
        sig.push(s.into_iter().map(|v| v.expect("every element has a parent")).collect());
    }
    Some(sig)
}

/// Number of subsets of `{F_2..F_{n+1}}` with each sum, by dynamic programming.
pub fn subset_sum_counts(n: usize) -> Vec<BigInt> {
    let total: u64 = (2..=n + 1).map(fib).sum();
    let mut dp = vec![BigInt::zero(); total as usize + 1];
    dp[0] = BigInt::one();
    let mut reach = 0usize;
    for i in 2..=n + 1 {
        let f = fib(i) as usize;
        for s in (0..=reach).rev() {
            if !dp[s].is_zero() {
                let v = dp[s].clone();
                dp[s + f] += v;
            }
        }
        reach += f;
    }
    dp
}

fn is_subsequence<T: PartialEq>(a: impl IntoIterator<Item = T>, b: &[T]) -> bool {
    let mut it = b.iter();
    a.into_iter().all(|x| it.any(|y| *y == x))
}

fn direction(s: &[u64], conv: SentinelConvention) -> Monotone {
    let ords: Vec<Ordering> = s.windows(2).map(|w| prec_compare(w[0], w[1], conv)).collect();
    if ords.iter().all(|&o| o == Ordering::Less) {
        Monotone::Increasing
    } else if ords.iter().all(|&o| o == Ordering::Greater) {
        Monotone::Decreasing
    } else {
        Monotone::Mixed
    }
}

/// Label the edges under every orientation, check the label invariants,
/// and select a valid orientation, preferring one under which the label
/// sequences increase in the default order.
pub fn sigma_labels(slice: &PosetSlice) -> SigmaReport {
    let poset = &slice.poset;
    let top = poset.top_rank();
    let subset: Vec<Vec<BigInt>> = (0..=top).map(subset_sum_counts).collect();
    let candidates: Vec<OrientationResult> = Orientation::all()
        .into_iter()
        .map(|o| {
            let seqs = sigma_under(poset, o);
            let (bijective, subset_counts) = match &seqs {
                None => (false, false),
                Some(sig) => {
                    let bij = (1..=top).all(|n| {
                        let mut v = sig[n].clone();
                        v.sort_unstable();
                        v.iter().copied().eq(0..fib(n + 3) - 1)
                    });
                    let sub = (1..=top).all(|n| {
                        sig[n].iter().zip(&slice.chains[n]).all(|(&s, c)| subset[n].get(s as usize) == Some(c))
                    });
                    (bij, sub)
                }
            };
            OrientationResult { orientation: o, equal_sums: seqs.is_some(), bijective, subset_counts, sequences: seqs }
        })
        .collect();
    let increasing = |r: &OrientationResult| {
        r.sequences
            .as_ref()
            .is_some_and(|s| s[1..].iter().all(|x| direction(x, SentinelConvention::default()) == Monotone::Increasing))
    };
    let chosen =
        candidates.iter().find(|r| r.valid() && increasing(r)).or_else(|| candidates.iter().find(|r| r.valid()));
    let selected = chosen.map(|r| r.orientation);
    let sequences = chosen.and_then(|r| r.sequences.clone()).unwrap_or_default();
    let nested = |rev: bool| {
        sequences.len() > 2
            && (1..sequences.len() - 1).all(|n| {
                if rev {
                    is_subsequence(sequences[n].iter().rev().copied(), &sequences[n + 1])
                } else {
                    is_subsequence(sequences[n].iter().copied(), &sequences[n + 1])
                }
            })
    };
    let prec_directions = SentinelConvention::all()
        .into_iter()
        .map(|c| (c, sequences.iter().skip(1).map(|s| direction(s, c)).collect()))
        .collect();
    SigmaReport {
        nested_same_direction: nested(false),
        nested_reversed: nested(true),
        candidates,
        selected,
        sequences,
        prec_directions,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagValues {
    /// Chains `t_1 < ... < t_k` with `rank(t_j) = r_j`, counted in the poset.
    pub alpha_chains: BigInt,
    /// `q_{r_1} q_{r_2 - r_1} ...`.
    pub alpha_product: BigInt,
    /// `sum_{T subset S} (-1)^{|S - T|} alpha(T)`.
    pub beta: BigInt,
}

fn alpha_by_chains(poset: &GradedPoset, ranks: &[usize]) -> BigInt {
    let Some(&r0) = ranks.first() else {
        return BigInt::one();
    };
    let mut f: Vec<BigInt> = vec![BigInt::one(); poset.parents[r0].len()];
    for w in ranks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mut g = vec![BigInt::zero(); poset.parents[hi].len()];
        for (k, fk) in f.iter().enumerate() {
            if fk.is_zero() {
                continue;
            }
            let up = poset.upset(lo, k, hi - lo);
            for &u in &up[hi - lo] {
                g[u] += fk;
            }
        }
        f = g;
    }
    f.into_iter().sum()
}

fn alpha_by_product(q: &[usize], ranks: &[usize]) -> BigInt {
    let mut prev = 0;
    let mut out = BigInt::one();
    for &r in ranks {
        out *= BigInt::from(q[r - prev]);
        prev = r;
    }
    out
}

/// Flag f- and h-vector entries at a rank set `s` of positive ranks.
pub fn flag_vectors(poset: &GradedPoset, s: &[usize]) -> Result<FlagValues> {
    let mut ranks = s.to_vec();
    ranks.sort_unstable();
    ranks.dedup();
    if ranks.first() == Some(&0) {
        return invalid("rank sets contain positive ranks only");
    }
    if ranks.last().is_some_and(|&r| r > poset.top_rank()) {
        return invalid(format!("rank set reaches beyond the built depth {}", poset.top_rank()));
    }
    let q = poset.rank_sizes();
    let k = ranks.len();
    let mut beta = BigInt::zero();
    for mask in 0u32..(1 << k) {
        let sub: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).collect();
        let a = alpha_by_chains(poset, &sub);
        if (k - sub.len()) % 2 == 0 {
            beta += a;
        } else {
            beta -= a;
        }
    }
    Ok(FlagValues { alpha_chains: alpha_by_chains(poset, &ranks), alpha_product: alpha_by_product(&q, &ranks), beta })
}

/// Rows of the planar upho poset where every element has `i` covers and
/// consecutive covers close a `2b`-gon.
#[derive(Clone, Debug)]
pub struct Frontier {
    pub i: usize,
    pub b: usize,
    pub poset: GradedPoset,
    /// Rank sizes `q_0..q_{n_max}`.
    pub q: Vec<BigInt>,
    /// Chain counts per rank, left to right.
    pub rows: Vec<Vec<BigInt>>,
    /// `r_1..r_{n_max}` with `r_n = (q_n - q_{n-1}) / (i - 1)`.
    pub r: Vec<u64>,
    /// Gap countdowns between neighbours on the top rank.
    pub top_gaps: Vec<usize>,
}

/// Grow the frontier rank by rank, then check the rank recurrence and the
/// product form of every row.
pub fn frontier_grow(i: usize, b: usize, n_max: usize, limits: &Limits) -> Result<Frontier> {
    if i < 2 || b < 2 {
        return invalid("frontier posets need i >= 2 and b >= 2");
    }
    let mut parents: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new()]];
    let mut gaps: Vec<usize> = Vec::new();
    let mut total: u64 = 1;
    for n in 1..=n_max {
        let width = parents[n - 1].len();
        let mut ps: Vec<Vec<usize>> = Vec::new();
        let mut next_gaps: Vec<usize> = Vec::new();
        for j in 0..width {
            for c in 0..i {
                if c == 0 && j > 0 {
                    let g = gaps[j - 1];
                    if g == 1 {
                        ps.last_mut().expect("a left neighbour exists").push(j);
                        continue;
                    }
                    next_gaps.push(g - 1);
                } else if c > 0 {
                    next_gaps.push(b - 1);
                }
                ps.push(vec![j]);
            }
        }
        total += ps.len() as u64;
        limits.check(n, total, 48)?;
        parents.push(ps);
        gaps = next_gaps;
    }
    if gaps.iter().any(|&g| g == 0 || g >= b) {
        return violated("gap countdown left [1, b-1]");
    }
    let poset = GradedPoset { parents };
    let rows = poset.chain_counts();
    let q: Vec<BigInt> = poset.rank_sizes().into_iter().map(BigInt::from).collect();
    let bi = BigInt::from(i);
    let im1 = BigInt::from(i - 1);
    for n in 1..=n_max {
        let back = if n >= b { q[n - b].clone() } else { BigInt::zero() };
        if q[n] != &bi * &q[n - 1] - &im1 * back {
            return violated(format!("rank {n} of P_{{{i},{b}}} breaks the rank recurrence"));
        }
    }
    let mut r = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let d = &q[n] - &q[n - 1];
        if !(&d % &im1).is_zero() {
            return violated(format!("q_{n} - q_{} is not divisible by {}", n - 1, i - 1));
        }
        r.push((d / &im1).to_u64().ok_or(Error::Overflow("frontier r_n"))?);
    }
    // Row n against prod_{j<=n} (1 + x^{r_j} + ... + x^{(i-1) r_j}).
    let mut prod: Vec<BigInt> = vec![BigInt::one()];
    for n in 1..=n_max {
        let rn = r[n - 1] as usize;
        let mut next = vec![BigInt::zero(); prod.len() + (i - 1) * rn];
        for (k, c) in prod.iter().enumerate() {
            for m in 0..i {
                next[k + m * rn] += c;
            }
        }
        prod = next;
        if prod != rows[n] {
            return violated(format!("row {n} of P_{{{i},{b}}} differs from the product of its rank steps"));
        }
    }
    if poset.up_degrees().iter().flatten().any(|&d| d != i) {
        return violated(format!("an element of P_{{{i},{b}}} does not have {i} covers"));
    }
    Ok(Frontier { i, b, poset, q, rows, r, top_gaps: gaps })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UphoReport {
    pub depth: usize,
    /// Elements `(rank, index)` whose upper set was compared.
    pub checked: usize,
    /// Elements whose truncated upper set is not isomorphic to the poset.
    pub failures: Vec<(usize, usize)>,
    /// Elements for which the left-to-right map was not an isomorphism.
    pub non_planar_matches: usize,
}

impl UphoReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

/// Covers of the upper set `up` (by relative rank), re-indexed within it.
fn induced_parents(poset: &GradedPoset, base_rank: usize, up: &[Vec<usize>]) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![vec![Vec::new()]];
    for d in 1..up.len() {
        let index_of = |x: usize| up[d - 1].binary_search(&x).ok();
        let rank = &poset.parents[base_rank + d];
        out.push(
            up[d]
                .iter()
                .map(|&u| {
                    let mut ps: Vec<usize> = rank[u].iter().filter_map(|&p| index_of(p)).collect();
                    ps.sort_unstable();
                    ps
                })
                .collect(),
        );
    }
    out
}

fn same_covers(a: &[Vec<Vec<usize>>], b: &[Vec<Vec<usize>>], maps: &[Vec<usize>]) -> bool {
    (1..a.len()).all(|d| {
        a[d].iter().enumerate().all(|(k, ps)| {
            let mut img: Vec<usize> = ps.iter().map(|&p| maps[d - 1][p]).collect();
            img.sort_unstable();
            let mut want = b[d][maps[d][k]].clone();
            want.sort_unstable();
            img == want
        })
    })
}

/// Rank-by-rank backtracking search for an isomorphism between two ranked DAGs.
fn isomorphic(a: &[Vec<Vec<usize>>], b: &[Vec<Vec<usize>>]) -> bool {
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.len() != y.len()) {
        return false;
    }
    fn extend(
        a: &[Vec<Vec<usize>>],
        b: &[Vec<Vec<usize>>],
        maps: &mut Vec<Vec<usize>>,
        d: usize,
        k: usize,
        used: &mut Vec<bool>,
    ) -> bool {
        if d == a.len() {
            return true;
        }
        if k == a[d].len() {
            if d + 1 == a.len() {
                return true;
            }
            let mut fresh = vec![false; a[d + 1].len()];
            maps.push(Vec::new());
            if extend(a, b, maps, d + 1, 0, &mut fresh) {
                return true;
            }
            maps.pop();
            return false;
        }
        let mut img: Vec<usize> = a[d][k].iter().map(|&p| maps[d - 1][p]).collect();
        img.sort_unstable();
        for u in 0..b[d].len() {
            if used[u] {
                continue;
            }
            let mut want = b[d][u].clone();
            want.sort_unstable();
            if want != img {
                continue;
            }
            used[u] = true;
            maps[d].push(u);
            if extend(a, b, maps, d, k + 1, used) {
                return true;
            }
            maps[d].pop();
            used[u] = false;
        }
        false
    }
    let mut maps = vec![vec![0usize]];
    if a.len() == 1 {
        return true;
    }
    maps.push(Vec::new());
    let mut used = vec![false; a[1].len()];
    extend(a, b, &mut maps, 1, 0, &mut used)
}

/// For every element of rank at most 2, compare its upper set truncated to
/// `depth` ranks with the poset truncated to `depth` ranks.
pub fn upho_check(poset: &GradedPoset, depth: usize) -> Result<UphoReport> {
    if poset.top_rank() < depth + 2 {
        return invalid(format!("upho check to depth {depth} needs the poset built to rank {}", depth + 2));
    }
    let base: Vec<Vec<Vec<usize>>> = poset.parents[..=depth].to_vec();
    let mut report = UphoReport { depth, checked: 0, failures: Vec::new(), non_planar_matches: 0 };
    for rank in 0..=2 {
        for k in 0..poset.parents[rank].len() {
            report.checked += 1;
            let up = poset.upset(rank, k, depth);
            let induced = induced_parents(poset, rank, &up);
            let profile_ok = induced.iter().map(Vec::len).eq(base.iter().map(Vec::len));
            if !profile_ok {
                report.failures.push((rank, k));
                continue;
            }
            let identity: Vec<Vec<usize>> = induced.iter().map(|r| (0..r.len()).collect()).collect();
            if same_covers(&induced, &base, &identity) {
                continue;
            }
            report.non_planar_matches += 1;
            if !isomorphic(&induced, &base) {
                report.failures.push((rank, k));
            }
        }
    }
    Ok(report)
}

/// Signed integer `t` as a constant polynomial.
pub fn t_const(t: i64) -> TPoly {
    TPoly::constant(BigInt::from(t))
}

/// Whether the leading group of `row` begins with a virtual member.
pub fn leading_virtual(row: &GroupedRow) -> bool {
    row.groups.first().is_some_and(|g| g.leading_virtual)
}

/// Largest absolute entry of an integer row.
pub fn max_abs_entry(row: &GroupedRow) -> Result<BigInt> {
    Ok(row.integer_entries()?.into_iter().map(|v| v.abs()).max().unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lim() -> Limits {
        Limits::default()
    }

    fn ints(row: &GroupedRow) -> Vec<i64> {
        row.integer_entries().unwrap().iter().map(|v| v.to_i64().unwrap()).collect()
    }

    fn visible_groups(row: &GroupedRow) -> Vec<Vec<i64>> {
        let v = ints(row);
        row.groups.iter().map(|g| v[g.start..g.start + g.visible_len()].to_vec()).collect()
    }

    #[test]
    fn first_rows() {
        let rows = triangle_rows(5, &TPoly::one(), &lim()).unwrap();
        assert_eq!(ints(&rows[0]), vec![1, 1]);
        assert_eq!(visible_groups(&rows[1]), vec![vec![1, 1], vec![1, 1]]);
        assert!(rows[1].groups[0].leading_virtual && rows[1].groups[1].trailing_virtual);
        assert_eq!(
            visible_groups(&rows[4]),
            vec![
                vec![1, 1],
                vec![1, 2, 1],
                vec![2, 2],
                vec![1, 3, 2],
                vec![2, 3, 1],
                vec![2, 2],
                vec![1, 2, 1],
                vec![1, 1]
            ]
        );
        assert_eq!(ints(&rows[2]), vec![1, 1, 1, 2, 1, 1, 1]);
    }

    #[test]
    fn symbolic_rows() {
        let t = TPoly::var();
        let rows = triangle_rows(2, &t, &lim()).unwrap();
        assert_eq!(rows[0].entries, vec![TPoly::one(), t.clone()]);
        assert_eq!(rows[1].entries, vec![TPoly::one(), t.clone(), t.clone(), &t * &t]);
        let r = triangle_rows(1, &t_const(-1), &lim()).unwrap();
        assert_eq!(ints(&r[0]), vec![1, -1]);
    }

    #[test]
    fn next_row_is_checked() {
        let r1 = first_row(&TPoly::one());
        let r2 = next_row(&r1, &TPoly::one(), &lim()).unwrap();
        assert_eq!(ints(&r2), vec![1, 1, 1, 1]);
        let mut broken = r2.clone();
        broken.entries[2] = t_const(5);
        let err = next_row(&broken, &TPoly::one(), &lim()).unwrap_err();
        assert!(matches!(err, Error::InvariantViolation(_)));
    }

    #[test]
    fn virtual_parity() {
        let rows = triangle_rows(22, &TPoly::one(), &lim()).unwrap();
        for row in &rows {
            assert_eq!(leading_virtual(row), row.n % 2 == 0, "row {}", row.n);
            assert_eq!(row.visible_len() as u64, fib(row.n + 3) - 1);
        }
    }

    #[test]
    fn mark_vectors() {
        let rows = triangle_rows(4, &TPoly::one(), &lim()).unwrap();
        let v: Vec<AVector> = rows.iter().map(|r| a_vector(r).unwrap()).collect();
        assert_eq!(v[0], AVector::from_i64s([1, 0, 1, 0, 0, 1, 0]));
        assert_eq!(v[1], AVector::from_i64s([1, 2, 1, 1, 1, 0, 1]));
        assert_eq!(v[3], AVector::from_i64s([7, 10, 7, 6, 5, 4, 5]));
        assert_eq!(marks(&rows[1]), vec![Mark::Middle, Mark::Last, Mark::First, Mark::Middle]);
    }

    #[test]
    fn matrix_recurrence() {
        let rep = verify_m_recurrence(20, &lim()).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.first_valid, Some(1));
        assert_eq!(rep.vectors[2].square_sum(), BigInt::from(10));
        assert_eq!(rep.charpoly, TPoly::from_i64s(&[0, 0, 2, 2, -4, -5, 0, 1]));
    }

    #[test]
    fn poset_basics() {
        let s = build_poset(6, &lim()).unwrap();
        assert_eq!(s.rank_sizes(), vec![1, 2, 4, 7, 12, 20, 33]);
        assert_eq!(s.chains[3][3], BigInt::from(2));
        assert!(s.poset.up_degrees().iter().flatten().all(|&d| d == 2));
        assert!(s.to_dot().contains("r0_0 -> r1_0"));
    }

    #[test]
    fn sigma() {
        let s = build_poset(8, &lim()).unwrap();
        let rep = sigma_labels(&s);
        let valid: Vec<Orientation> = rep.candidates.iter().filter(|c| c.valid()).map(|c| c.orientation).collect();
        assert_eq!(valid.len(), 2);
        assert_eq!(rep.selected, Some(Orientation { flip_even: true, flip_odd: true }));
        assert_eq!(rep.sequences[1], vec![1, 0]);
        let natural = rep.candidates.iter().find(|c| c.orientation == Orientation::all()[0]).unwrap();
        let nat = natural.sequences.as_ref().unwrap();
        assert_eq!(nat[2], vec![2, 0, 3, 1]);
        assert_eq!(nat[3], vec![2, 5, 0, 3, 6, 1, 4]);
        assert!(rep.nested_same_direction);
        assert!(!rep.nested_reversed);
        assert_eq!(rep.prec_consistent(SentinelConvention::default()), Some(Monotone::Increasing));
    }

    #[test]
    fn subset_sums() {
        let d = subset_sum_counts(3);
        assert_eq!(d.iter().map(|v| v.to_i64().unwrap()).collect::<Vec<_>>(), vec![1, 1, 1, 2, 1, 1, 1]);
    }

    #[test]
    fn flags() {
        let s = build_poset(7, &lim()).unwrap();
        let f = flag_vectors(&s.poset, &[1, 2]).unwrap();
        assert_eq!(f.alpha_chains, BigInt::from(4));
        assert_eq!(f.alpha_product, BigInt::from(4));
        assert_eq!(f.beta, BigInt::from(-1));
        let f = flag_vectors(&s.poset, &[1]).unwrap();
        assert_eq!((f.alpha_chains, f.beta), (BigInt::from(2), BigInt::from(1)));
        let f = flag_vectors(&s.poset, &[]).unwrap();
        assert_eq!((f.alpha_chains, f.beta), (BigInt::one(), BigInt::one()));
        assert!(flag_vectors(&s.poset, &[9]).is_err());
    }

    #[test]
    fn frontiers() {
        let f = frontier_grow(2, 3, 8, &lim()).unwrap();
        let q: Vec<u64> = f.q.iter().map(|v| v.to_u64().unwrap()).collect();
        assert_eq!(q, (0..=8).map(|n| fib(n + 3) - 1).collect::<Vec<_>>());
        let rows = triangle_rows(8, &TPoly::one(), &lim()).unwrap();
        for (n, row) in rows.iter().enumerate() {
            assert_eq!(row.integer_entries().unwrap(), f.rows[n + 1]);
        }
        let p = frontier_grow(2, 2, 6, &lim()).unwrap();
        assert_eq!(p.q, (0..=6).map(|n| BigInt::from(n + 1)).collect::<Vec<_>>());
        let s = frontier_grow(3, 2, 6, &lim()).unwrap();
        assert_eq!(s.r, vec![1, 2, 4, 8, 16, 32]);
        assert!(frontier_grow(1, 3, 3, &lim()).is_err());
    }

    #[test]
    fn upho() {
        let s = build_poset(6, &lim()).unwrap();
        let r = upho_check(&s.poset, 4).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.checked, 1 + 2 + 4);
        let p = frontier_grow(2, 2, 6, &lim()).unwrap();
        assert!(upho_check(&p.poset, 4).unwrap().passed());
        assert!(upho_check(&s.poset, 5).is_err());
    }

    #[test]
    fn non_upho_detected() {
        // A poset where one rank-1 element has a single cover is not upho.
        let p = GradedPoset {
            parents: vec![
                vec![vec![]],
                vec![vec![0], vec![0]],
                vec![vec![0], vec![0], vec![1]],
                vec![vec![0], vec![0, 1], vec![1, 2], vec![2]],
            ],
        };
        assert!(!upho_check(&p, 1).unwrap().passed());
    }

    #[test]
    fn charpoly_small() {
        let a = vec![vec![BigInt::from(2), BigInt::from(1)], vec![BigInt::from(1), BigInt::from(2)]];
        assert_eq!(charpoly(&a).unwrap(), TPoly::from_i64s(&[3, -4, 1]));
    }

    #[test]
    fn show_style() {
        let rows = triangle_rows(3, &TPoly::one(), &lim()).unwrap();
        let s = show(&rows);
        assert_eq!(s.lines().last().unwrap(), "1 1 \u{2022} 1 2 1 \u{2022} 1 1");
    }

    proptest! {
        #[test]
        fn rows_match_products_for_integer_t(t in -3i64..=3, n in 1usize..10) {
            let rows = triangle_rows(n, &t_const(t), &lim());
            prop_assert!(rows.is_ok());
        }

        #[test]
        fn flag_product_formula(mask in 0u32..64) {
            let s: Vec<usize> = (0..6).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
            let p = build_poset(6, &lim()).unwrap();
            let f = flag_vectors(&p.poset, &s).unwrap();
            prop_assert_eq!(f.alpha_chains, f.alpha_product);
        }
    }
}
