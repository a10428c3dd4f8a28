//! C ABI over `fibrgf`.
//!
//! Every entry point returns a [`FibrgfStatus`]. Results go through out
//! pointers; strings handed out are owned by the caller and released with
//! [`fibrgf_string_free`]. On a non-OK status the message is available from
//! [`fibrgf_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigInt;
use serde_json::{json, Value};

use fibrgf::cli::verify;
use fibrgf::guess::{guess_integers, GuessOptions};
use fibrgf::polynomials::{build_product, CoeffPoly, Limits, ProductSpec};
use fibrgf::stats::{corr_sum, CorrSpec};
use fibrgf::{Error, TPoly};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FibrgfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    ResourceLimit = 4,
    InvariantViolation = 5,
    /// The guesser found no rational function within the bounds.
    NoFit = 6,
    /// A verification ran and reported `fail` or `inconclusive`.
    CheckFailed = 7,
    Panic = 8,
    Internal = 9,
}

/// Expanded product polynomial with integer coefficients.
pub struct FibrgfProduct {
    poly: CoeffPoly<BigInt>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn status_of(e: &Error) -> FibrgfStatus {
    match e {
        Error::InvalidArgument(_) => FibrgfStatus::InvalidArgument,
        Error::Parse(_) | Error::Json(_) => FibrgfStatus::Parse,
        Error::ResourceLimit { .. } | Error::CapExceeded { .. } => FibrgfStatus::ResourceLimit,
        Error::InvariantViolation(_) => FibrgfStatus::InvariantViolation,
        Error::Overflow(_) | Error::Io(_) => FibrgfStatus::Internal,
    }
}

type Outcome = Result<(), (FibrgfStatus, String)>;

fn fail(status: FibrgfStatus, msg: impl Into<String>) -> Outcome {
    Err((status, msg.into()))
}

fn lib(e: Error) -> (FibrgfStatus, String) {
    (status_of(&e), e.to_string())
}

/// Run `body`, clearing the last error, mapping errors and panics to codes.
fn guard(body: impl FnOnce() -> Outcome) -> FibrgfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => FibrgfStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside fibrgf");
            FibrgfStatus::Panic
        }
    }
}

fn give_string(out: *mut *mut c_char, s: String) -> Outcome {
    let c = CString::new(s).map_err(|_| (FibrgfStatus::Internal, "interior NUL in output".to_string()))?;
    // SAFETY: callers check `out` for null before building output.
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn product(spec: &ProductSpec, out: *mut *mut FibrgfProduct) -> Outcome {
    if out.is_null() {
        return fail(FibrgfStatus::NullPointer, "out is null");
    }
    let poly = build_product::<BigInt>(spec, &Limits::from_env()).map_err(lib)?;
    // SAFETY: `out` is non-null and points to writable storage per the contract.
    unsafe { *out = Box::into_raw(Box::new(FibrgfProduct { poly })) };
    Ok(())
}

/// `prod_{i=1}^n (1 + t x^{F^{(k)}_{i+k-1}})`; `k = 2` gives the Fibonacci case.
///
/// # Safety
/// `out` must be a valid pointer; the handle is released with [`fibrgf_product_free`].
#[no_mangle]
pub unsafe extern "C" fn fibrgf_product_kbonacci(k: u32, t: i64, n: u32, out: *mut *mut FibrgfProduct) -> FibrgfStatus {
    guard(|| {
        let spec = ProductSpec::kbonacci(k as usize, TPoly::constant(t.into()), n as usize).map_err(lib)?;
        product(&spec, out)
    })
}

/// Stern's product `prod_{i=0}^{n-1} (1 + x^{2^i} + x^{2^{i+1}})`.
///
/// # Safety
/// `out` must be a valid pointer; the handle is released with [`fibrgf_product_free`].
#[no_mangle]
pub unsafe extern "C" fn fibrgf_product_stern(n: u32, out: *mut *mut FibrgfProduct) -> FibrgfStatus {
    guard(|| product(&ProductSpec::stern(n as usize), out))
}

/// # Safety
/// `p` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fibrgf_product_free(p: *mut FibrgfProduct) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

unsafe fn handle<'a>(p: *const FibrgfProduct) -> Result<&'a FibrgfProduct, (FibrgfStatus, String)> {
    p.as_ref().ok_or_else(|| (FibrgfStatus::NullPointer, "product handle is null".to_string()))
}

/// Highest exponent with a nonzero coefficient.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fibrgf_product_degree(p: *const FibrgfProduct, out: *mut u64) -> FibrgfStatus {
    guard(|| {
        let h = handle(p)?;
        if out.is_null() {
            return fail(FibrgfStatus::NullPointer, "out is null");
        }
        *out = h.poly.degree();
        Ok(())
    })
}

/// Coefficient of `x^e` as a decimal string (zero beyond the degree).
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fibrgf_product_coefficient(
    p: *const FibrgfProduct,
    e: u64,
    out: *mut *mut c_char,
) -> FibrgfStatus {
    guard(|| {
        let h = handle(p)?;
        if out.is_null() {
            return fail(FibrgfStatus::NullPointer, "out is null");
        }
        give_string(out, h.poly.coeff(e).to_string())
    })
}

/// `sum_j prod_i c(j+i)^{alpha_i}` over the coefficients, as a decimal string.
///
/// # Safety
/// `p` must be a live handle, `alpha` must point to `len` values, `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fibrgf_product_corr_sum(
    p: *const FibrgfProduct,
    alpha: *const u32,
    len: usize,
    out: *mut *mut c_char,
) -> FibrgfStatus {
    guard(|| {
        let h = handle(p)?;
        if alpha.is_null() || out.is_null() {
            return fail(FibrgfStatus::NullPointer, "alpha or out is null");
        }
        let spec = CorrSpec::new(std::slice::from_raw_parts(alpha, len).to_vec()).map_err(lib)?;
        let v = corr_sum(&h.poly, &spec).map_err(lib)?;
        let v = v.as_integer().ok_or_else(|| (FibrgfStatus::Internal, "non-integer sum".to_string()))?;
        give_string(out, v.to_string())
    })
}

/// Fit a rational generating function to `values[0..len]`.
///
/// On success `out` receives JSON `{"num": [...], "den": [...], "form": "...",
/// "den_max_used": d}`; without a fit the status is `NoFit` and `out` is untouched.
///
/// # Safety
/// `values` must point to `len` integers and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fibrgf_guess(
    values: *const i64,
    len: usize,
    den_max: u32,
    holdout: u32,
    out: *mut *mut c_char,
) -> FibrgfStatus {
    guard(|| {
        if values.is_null() || out.is_null() {
            return fail(FibrgfStatus::NullPointer, "values or out is null");
        }
        let data: Vec<BigInt> = std::slice::from_raw_parts(values, len).iter().map(|&v| v.into()).collect();
        let opts = GuessOptions::new(den_max as usize, 0, holdout as usize);
        match guess_integers(&data, &opts).map_err(lib)? {
            Some(fit) => {
                let mut j = fit.form.to_json();
                j["form"] = Value::String(fit.form.to_string());
                j["den_max_used"] = json!(fit.den_max_used);
                give_string(out, j.to_string())
            }
            None => fail(FibrgfStatus::NoFit, format!("no rational fit with denominator degree <= {den_max}")),
        }
    })
}

/// Run the named verification with default parameters; `out` receives the
/// JSON report whenever the check ran, including `CheckFailed`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fibrgf_verify(name: *const c_char, out: *mut *mut c_char) -> FibrgfStatus {
    guard(|| {
        if name.is_null() || out.is_null() {
            return fail(FibrgfStatus::NullPointer, "name or out is null");
        }
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| (FibrgfStatus::InvalidArgument, "name is not UTF-8".to_string()))?;
        let rep = verify::run_check(name, &Default::default()).map_err(lib)?;
        let pass = rep.status.is_pass();
        let summary = rep.summary();
        give_string(out, rep.to_json().to_string())?;
        if pass {
            Ok(())
        } else {
            fail(FibrgfStatus::CheckFailed, summary)
        }
    })
}

/// Message for the last non-OK status on this thread, or null. Valid until
/// the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn fibrgf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fibrgf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn fibrgf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
