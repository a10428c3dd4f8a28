use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::polynomials::Limits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    /// Conjecture consistent with every computed term up to the reported depth.
    PassAtDepth,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass | Status::PassAtDepth => 0,
            Status::Fail => 1,
            Status::Inconclusive => 3,
        }
    }

    pub fn is_pass(self) -> bool {
        matches!(self, Status::Pass | Status::PassAtDepth)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::PassAtDepth => "pass-at-depth",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub params: Value,
    pub status: Status,
    /// A `fail` always carries `counterexample`.
    pub details: Value,
    pub elapsed_ms: u64,
}

impl CheckReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("reports serialize")
    }

    pub fn counterexample(&self) -> Option<&Value> {
        self.details.get("counterexample")
    }

    /// One line: name, status, elapsed time, and the headline detail.
    pub fn summary(&self) -> String {
        let head = self
            .details
            .get("counterexample")
            .or_else(|| self.details.get("summary"))
            .map(|v| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .unwrap_or_default();
        format!("{:<14} {:<13} {:>8} ms  {}", self.name, self.status.to_string(), self.elapsed_ms, head)
    }
}

/// Parameters shared by every check; `None` selects the check's default.
#[derive(Clone, Debug, Default)]
pub struct CheckParams {
    pub nmax: Option<usize>,
    pub k: Option<usize>,
    pub kmax: Option<usize>,
    pub r: Option<usize>,
    pub m: Option<u64>,
    pub a: Option<u64>,
    pub terms: Option<usize>,
    pub depth: Option<usize>,
    pub den_max: Option<usize>,
    pub holdout: Option<usize>,
    pub alpha: Option<Vec<u32>>,
    /// Factor coefficients `a_1..a_h` of a generalized product.
    pub coeffs: Option<Vec<i64>>,
    /// Prefactor `P(x)`, ascending coefficients.
    pub prefactor: Option<Vec<i64>>,
    pub limits: Option<Limits>,
}

impl CheckParams {
    pub fn nmax(mut self, n: usize) -> Self {
        self.nmax = Some(n);
        self
    }

    pub fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn kmax(mut self, k: usize) -> Self {
        self.kmax = Some(k);
        self
    }

    pub fn r(mut self, r: usize) -> Self {
        self.r = Some(r);
        self
    }

    pub fn m(mut self, m: u64) -> Self {
        self.m = Some(m);
        self
    }

    pub fn a(mut self, a: u64) -> Self {
        self.a = Some(a);
        self
    }

    pub fn terms(mut self, n: usize) -> Self {
        self.terms = Some(n);
        self
    }

    pub fn depth(mut self, d: usize) -> Self {
        self.depth = Some(d);
        self
    }

    pub fn alpha(mut self, alpha: Vec<u32>) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn coeffs(mut self, c: Vec<i64>) -> Self {
        self.coeffs = Some(c);
        self
    }

    pub fn prefactor(mut self, c: Vec<i64>) -> Self {
        self.prefactor = Some(c);
        self
    }

    pub fn limits(mut self, l: Limits) -> Self {
        self.limits = Some(l);
        self
    }

    pub(crate) fn limits_or(&self, default: Limits) -> Limits {
        self.limits.unwrap_or(default)
    }
}

/// What a check body hands back; the runner adds name and timing.
pub(crate) struct Outcome {
    pub status: Status,
    pub params: Map<String, Value>,
    pub details: Map<String, Value>,
}

impl Outcome {
    pub fn new(params: Map<String, Value>) -> Self {
        Self { status: Status::Pass, params, details: Map::new() }
    }

    pub fn param(&mut self, key: &str, v: impl Into<Value>) {
        self.params.insert(key.to_string(), v.into());
    }

    pub fn detail(&mut self, key: &str, v: impl Into<Value>) {
        self.details.insert(key.to_string(), v.into());
    }

    /// Record the first counterexample and mark the check failed.
    pub fn fail(&mut self, what: impl Into<Value>) {
        if self.status != Status::Fail {
            self.status = Status::Fail;
            self.details.insert("counterexample".into(), what.into());
        }
    }

    pub fn inconclusive(&mut self, why: impl Into<String>) {
        if self.status != Status::Fail {
            self.status = Status::Inconclusive;
            self.details.insert("reason".into(), Value::String(why.into()));
        }
    }
}

/// Run `body`, turning theory violations into failed reports.
pub(crate) fn run_timed(name: &str, body: impl FnOnce(&mut Outcome) -> Result<()>) -> Result<CheckReport> {
    let start = Instant::now();
    let mut out = Outcome::new(Map::new());
    match body(&mut out) {
        Ok(()) => {}
        Err(Error::InvariantViolation(msg)) => out.fail(msg),
        Err(e) => return Err(e),
    }
    Ok(CheckReport {
        name: name.to_string(),
        params: Value::Object(out.params),
        status: out.status,
        details: Value::Object(out.details),
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Exact JSON number for a big integer.
pub fn big(v: &BigInt) -> Value {
    Value::Number(v.to_string().parse().expect("integers are valid JSON numbers"))
}

pub fn bigs(vs: &[BigInt]) -> Value {
    Value::Array(vs.iter().map(big).collect())
}

pub(crate) fn mismatch(n: usize, computed: impl fmt::Display, expected: impl fmt::Display) -> Value {
    json!({ "n": n, "computed": computed.to_string(), "expected": expected.to_string() })
}

/// First index where two sequences differ, comparing the common prefix.
pub(crate) fn first_diff<T: PartialEq>(a: &[T], b: &[T]) -> Option<usize> {
    a.iter().zip(b).position(|(x, y)| x != y)
}
