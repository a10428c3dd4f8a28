//! Command-line surface. Every subcommand is a thin adapter over the
//! library; `run` returns the process exit code.
//!
//! Exit codes: 0 ok or pass, 1 check failed, 2 usage error, 3 no fit found
//! (or an inconclusive scan).

pub mod report;
pub mod scan;
pub mod verify;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::guess::{guess_integers, GuessOptions};
use crate::polynomials::{build_product_auto, CoeffPoly, Limits, ProductSpec};
use crate::sequences::RecurrentSeq;
use crate::stats::{corr_series, residue_series, CorrSpec};
use crate::triangle::{build_poset, show, triangle_rows};
use crate::TPoly;

pub use report::{CheckParams, CheckReport, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO_FIT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "fibrgf", version, about = "Coefficient statistics of Fibonacci-type products")]
struct Cli {
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Cap on coefficients held by the polynomial engine (RGF_MAX_MEM_MB caps bytes).
    #[arg(long, global = true)]
    max_terms: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Correlation sums v_alpha(n) for n = 0..=nmax.
    Vsum {
        #[command(flatten)]
        prod: ProductArgs,
        #[arg(long, default_value = "2")]
        alpha: Csv<u32>,
    },
    /// Number of coefficients congruent to a mod m, for n = 0..=nmax.
    Congruence {
        #[command(flatten)]
        prod: ProductArgs,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        a: u64,
    },
    /// Coefficients of the product at n = nmax.
    Product {
        #[command(flatten)]
        prod: ProductArgs,
    },
    /// The grouped triangle.
    Triangle {
        #[command(subcommand)]
        what: TriangleCmd,
    },
    /// Fit a rational generating function to integer terms (JSON array or whitespace/comma separated).
    Guess {
        /// Input file; standard input when absent or "-".
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        den_max: usize,
        #[arg(long, default_value_t = 0)]
        num_extra: usize,
        #[arg(long, default_value_t = 6)]
        holdout: usize,
        /// Lower den-max to what the data support instead of rejecting.
        #[arg(long)]
        clamp: bool,
    },
    /// Run a named check, or `all`.
    Verify {
        name: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Gather evidence for a conjecture.
    Scan {
        name: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// List the registered checks and scans.
    List,
}

#[derive(Subcommand, Debug)]
enum TriangleCmd {
    /// Rows in the bulleted display.
    Show {
        #[arg(long, default_value_t = 5)]
        rows: usize,
        #[arg(long, default_value = "1")]
        t: TArg,
    },
    /// The poset on the first rows, as Graphviz.
    Dot {
        #[arg(long, default_value_t = 5)]
        rows: usize,
    },
}

#[derive(Args, Debug)]
struct ProductArgs {
    /// fib, kbonacci:K, stern, or custom:FILE.
    #[arg(long, default_value = "fib")]
    seq: SeqArg,
    /// Integer or `symbolic`.
    #[arg(long, default_value = "1")]
    t: TArg,
    #[arg(long)]
    nmax: usize,
}

#[derive(Args, Debug, Default)]
struct ParamArgs {
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    a: Option<u64>,
    #[arg(long)]
    terms: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    den_max: Option<usize>,
    #[arg(long)]
    holdout: Option<usize>,
    #[arg(long)]
    alpha: Option<Csv<u32>>,
    /// Factor coefficients a_1..a_h.
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<Csv<i64>>,
    /// Prefactor P(x), ascending coefficients.
    #[arg(long, allow_hyphen_values = true)]
    prefactor: Option<Csv<i64>>,
}

impl ParamArgs {
    fn into_params(self, limits: Option<Limits>) -> CheckParams {
        CheckParams {
            nmax: self.nmax,
            k: self.k,
            kmax: self.kmax,
            r: self.r,
            m: self.m,
            a: self.a,
            terms: self.terms,
            depth: self.depth,
            den_max: self.den_max,
            holdout: self.holdout,
            alpha: self.alpha.map(|c| c.0),
            coeffs: self.coeffs.map(|c| c.0),
            prefactor: self.prefactor.map(|c| c.0),
            limits,
        }
    }
}

/// Comma-separated list argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Csv<T>(pub Vec<T>);

impl<T: FromStr> FromStr for Csv<T> {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|x| x.trim().parse::<T>().map_err(|_| format!("bad list entry {x:?}")))
            .collect::<std::result::Result<_, _>>()
            .map(Csv)
    }
}

/// The exponent sequence of a product.
#[derive(Clone, Debug, PartialEq)]
pub enum SeqArg {
    Fib,
    Kbonacci(usize),
    Stern,
    Custom(PathBuf),
}

impl FromStr for SeqArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fib" => Ok(SeqArg::Fib),
            "stern" => Ok(SeqArg::Stern),
            _ => {
                if let Some(k) = s.strip_prefix("kbonacci:") {
                    let k = k.parse::<usize>().map_err(|_| format!("bad k in {s:?}"))?;
                    return Ok(SeqArg::Kbonacci(k));
                }
                if let Some(p) = s.strip_prefix("custom:") {
                    return Ok(SeqArg::Custom(PathBuf::from(p)));
                }
                Err(format!("unknown sequence {s:?}; expected fib, kbonacci:K, stern or custom:FILE"))
            }
        }
    }
}

/// An integer value of `t`, or `t` kept symbolic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TArg {
    Int(i64),
    Symbolic,
}

impl TArg {
    pub fn to_tpoly(self) -> TPoly {
        match self {
            TArg::Int(v) => TPoly::constant(v.into()),
            TArg::Symbolic => TPoly::var(),
        }
    }
}

impl FromStr for TArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "symbolic" {
            return Ok(TArg::Symbolic);
        }
        s.parse::<i64>().map(TArg::Int).map_err(|_| format!("t must be an integer or `symbolic`, got {s:?}"))
    }
}

/// `{"coeffs": [...], "init": [...], "offset": 0, "a": [...], "prefactor": [...]}`;
/// integers may be JSON numbers or decimal strings.
#[derive(Deserialize)]
struct CustomSpec {
    coeffs: Vec<Value>,
    init: Vec<Value>,
    #[serde(default)]
    offset: usize,
    #[serde(default)]
    a: Option<Vec<Value>>,
    #[serde(default)]
    prefactor: Option<Vec<Value>>,
}

fn json_int(v: &Value) -> Result<BigInt> {
    let s = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.trim().to_string(),
        other => return Err(Error::Parse(format!("expected an integer, got {other}"))),
    };
    s.parse::<BigInt>().map_err(|_| Error::Parse(format!("expected an integer, got {s:?}")))
}

fn json_ints(vs: &[Value]) -> Result<Vec<BigInt>> {
    vs.iter().map(json_int).collect()
}

/// The product described by `seq` with each factor coefficient scaled by `t`.
pub fn product_spec(seq: &SeqArg, t: &TPoly, n: usize) -> Result<ProductSpec> {
    Ok(match seq {
        SeqArg::Fib => ProductSpec::kbonacci(2, t.clone(), n)?,
        SeqArg::Kbonacci(k) => ProductSpec::kbonacci(*k, t.clone(), n)?,
        SeqArg::Stern => ProductSpec::new(RecurrentSeq::powers_of_two(), 0, vec![t.clone(), t.clone()], n),
        SeqArg::Custom(path) => {
            let c: CustomSpec = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            let seq = RecurrentSeq::new(json_ints(&c.coeffs)?, json_ints(&c.init)?)?;
            let a = match &c.a {
                Some(a) => json_ints(a)?.into_iter().map(|v| &TPoly::constant(v) * t).collect(),
                None => vec![t.clone()],
            };
            let mut spec = ProductSpec::new(seq, c.offset, a, n);
            if let Some(p) = &c.prefactor {
                let p = json_ints(p)?.into_iter().map(TPoly::constant).collect();
                spec = spec.with_prefactor(CoeffPoly::from_dense(0, p));
            }
            spec
        }
    })
}

/// A series value: an exact integer, or ascending `t`-coefficients.
pub fn series_json(series: &[TPoly]) -> Value {
    Value::Array(
        series
            .iter()
            .map(|v| match v.as_integer() {
                Some(i) => report::big(&i),
                None => report::bigs(v.coeffs()),
            })
            .collect(),
    )
}

fn exit_for(e: &Error) -> i32 {
    match e {
        // Requests beyond the configured caps are rejected like bad flags.
        Error::InvalidArgument(_)
        | Error::Parse(_)
        | Error::CapExceeded { .. }
        | Error::ResourceLimit { .. }
        | Error::Json(_)
        | Error::Io(_) => EXIT_USAGE,
        Error::InvariantViolation(_) | Error::Overflow(_) => EXIT_FAIL,
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_for(&e)
        }
    }
}

fn write_json(out: &mut dyn Write, v: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string(v)?)?;
    Ok(())
}

fn write_report(out: &mut dyn Write, rep: &CheckReport, as_json: bool) -> Result<()> {
    if as_json {
        write_json(out, &rep.to_json())
    } else {
        writeln!(out, "{}", rep.summary())?;
        Ok(())
    }
}

/// A JSON array of integers, or integers separated by whitespace or commas.
fn parse_terms(text: &str) -> Result<Vec<BigInt>> {
    if text.trim_start().starts_with('[') {
        let v: Value = serde_json::from_str(text)?;
        let arr = v.as_array().ok_or_else(|| Error::Parse("expected a JSON array of integers".into()))?;
        return json_ints(arr);
    }
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|w| !w.is_empty())
        .map(|w| w.parse().map_err(|_| Error::Parse(format!("not an integer: {w:?}"))))
        .collect()
}

fn read_input(path: Option<&PathBuf>) -> Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => Ok(std::fs::read_to_string(p)?),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let base = Limits::from_env();
    let limits = cli.max_terms.map(|m| base.with_max_terms(m));
    let lim = limits.unwrap_or(base);
    match cli.cmd {
        Cmd::Vsum { prod, alpha } => {
            let spec = product_spec(&prod.seq, &prod.t.to_tpoly(), prod.nmax)?;
            let series = corr_series(&spec, &CorrSpec::new(alpha.0)?, prod.nmax, &lim)?;
            write_json(out, &series_json(&series))?;
            Ok(EXIT_OK)
        }
        Cmd::Congruence { prod, m, a } => {
            if a >= m {
                return Err(Error::InvalidArgument(format!("need 0 <= a < m, got m={m}, a={a}")));
            }
            let spec = product_spec(&prod.seq, &prod.t.to_tpoly(), prod.nmax)?;
            let hist = residue_series(&spec, m, prod.nmax, &lim)?;
            write_json(out, &json!(hist.iter().map(|h| h[a as usize]).collect::<Vec<_>>()))?;
            Ok(EXIT_OK)
        }
        Cmd::Product { prod } => {
            let spec = product_spec(&prod.seq, &prod.t.to_tpoly(), prod.nmax)?;
            write_json(out, &build_product_auto(&spec, &lim)?.to_json())?;
            Ok(EXIT_OK)
        }
        Cmd::Triangle { what: TriangleCmd::Show { rows, t } } => {
            let rs = triangle_rows(rows, &t.to_tpoly(), &lim)?;
            if cli.json {
                let v: Vec<Value> = rs
                    .iter()
                    .map(|r| {
                        let groups: Vec<Vec<String>> = r
                            .groups
                            .iter()
                            .map(|g| (g.start..g.start + g.visible_len()).map(|k| r.entries[k].render("t")).collect())
                            .collect();
                        json!(groups)
                    })
                    .collect();
                write_json(out, &Value::Array(v))?;
            } else {
                out.write_all(show(&rs).as_bytes())?;
            }
            Ok(EXIT_OK)
        }
        Cmd::Triangle { what: TriangleCmd::Dot { rows } } => {
            out.write_all(build_poset(rows, &lim)?.to_dot().as_bytes())?;
            Ok(EXIT_OK)
        }
        Cmd::Guess { input, den_max, num_extra, holdout, clamp } => {
            let text = read_input(input.as_ref())?;
            let seq = parse_terms(&text)?;
            let mut opts = GuessOptions::new(den_max, num_extra, holdout);
            if clamp {
                opts = opts.clamped();
            }
            match guess_integers(&seq, &opts)? {
                Some(fit) => {
                    let mut j = fit.form.to_json();
                    j["form"] = Value::String(fit.form.to_string());
                    j["den_max_used"] = json!(fit.den_max_used);
                    write_json(out, &j)?;
                    Ok(EXIT_OK)
                }
                None => {
                    write_json(out, &Value::Null)?;
                    Ok(EXIT_NO_FIT)
                }
            }
        }
        Cmd::Verify { name, params } => {
            let p = params.into_params(limits);
            if name == "all" {
                let mut code = EXIT_OK;
                let mut reports = Vec::new();
                for (n, r) in verify::run_all(&p) {
                    match r {
                        Ok(rep) => {
                            if !rep.status.is_pass() {
                                code = EXIT_FAIL;
                            }
                            if cli.json {
                                reports.push(rep.to_json());
                            } else {
                                write_report(out, &rep, false)?;
                            }
                        }
                        Err(e) => {
                            code = EXIT_FAIL;
                            let msg = json!({ "name": n, "error": e.to_string() });
                            if cli.json {
                                reports.push(msg);
                            } else {
                                writeln!(out, "{n:<14} error         {e}")?;
                            }
                        }
                    }
                }
                if cli.json {
                    write_json(out, &Value::Array(reports))?;
                }
                return Ok(code);
            }
            let rep = verify::run_check(&name, &p)?;
            write_report(out, &rep, cli.json)?;
            Ok(if rep.status.is_pass() { EXIT_OK } else { EXIT_FAIL })
        }
        Cmd::Scan { name, params } => {
            let rep = scan::run_scan(&name, &params.into_params(limits))?;
            write_report(out, &rep, cli.json)?;
            Ok(rep.status.exit_code())
        }
        Cmd::List => {
            for c in verify::VERIFY {
                writeln!(out, "verify {:<14} {}", c.name, c.about)?;
            }
            for c in scan::SCANS {
                writeln!(out, "scan   {:<14} {}", c.name, c.about)?;
            }
            Ok(EXIT_OK)
        }
    }
}
