use std::ffi::{c_char, CStr, CString};
use std::ptr;

use fibrgf_ffi::*;

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let v = CStr::from_ptr(s).to_str().unwrap().to_string();
    fibrgf_string_free(s);
    v
}

unsafe fn last_error() -> String {
    let p = fibrgf_last_error();
    assert!(!p.is_null(), "error message expected");
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

#[test]
fn fibonacci_product_round_trip() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(fibrgf_product_kbonacci(2, 1, 3, &mut h), FibrgfStatus::Ok);
        let mut deg = 0;
        assert_eq!(fibrgf_product_degree(h, &mut deg), FibrgfStatus::Ok);
        assert_eq!(deg, 6);
        // (1+x)(1+x^2)(1+x^3)
        let coeffs: Vec<String> = (0..=7)
            .map(|e| {
                let mut s = ptr::null_mut();
                assert_eq!(fibrgf_product_coefficient(h, e, &mut s), FibrgfStatus::Ok);
                take(s)
            })
            .collect();
        assert_eq!(coeffs, ["1", "1", "1", "2", "1", "1", "1", "0"]);
        let alpha = [2u32];
        let mut s = ptr::null_mut();
        assert_eq!(fibrgf_product_corr_sum(h, alpha.as_ptr(), 1, &mut s), FibrgfStatus::Ok);
        assert_eq!(take(s), "10");
        fibrgf_product_free(h);
    }
}

#[test]
fn stern_square_sum() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(fibrgf_product_stern(2, &mut h), FibrgfStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(fibrgf_product_corr_sum(h, [2u32].as_ptr(), 1, &mut s), FibrgfStatus::Ok);
        assert_eq!(take(s), "13");
        fibrgf_product_free(h);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(fibrgf_product_kbonacci(1, 1, 3, &mut h), FibrgfStatus::InvalidArgument);
        assert!(h.is_null());
        assert!(last_error().contains("k >= 2"));
        assert_eq!(fibrgf_product_kbonacci(2, 1, 3, ptr::null_mut()), FibrgfStatus::NullPointer);
        let mut deg = 0;
        assert_eq!(fibrgf_product_degree(ptr::null(), &mut deg), FibrgfStatus::NullPointer);
        // A successful call clears the message.
        assert_eq!(fibrgf_product_kbonacci(2, 1, 1, &mut h), FibrgfStatus::Ok);
        assert!(fibrgf_last_error().is_null());
        fibrgf_product_free(h);
        fibrgf_product_free(ptr::null_mut());
        fibrgf_string_free(ptr::null_mut());
    }
}

#[test]
fn guess_fits_square_sums() {
    // v2(n) of the Fibonacci products.
    let mut v = vec![1i64, 2, 4, 10];
    while v.len() < 20 {
        let n = v.len();
        v.push(2 * v[n - 1] + 2 * v[n - 2] - 2 * v[n - 3]);
    }
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(fibrgf_guess(v.as_ptr(), v.len(), 6, 6, &mut s), FibrgfStatus::Ok);
        let j: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(j["num"], serde_json::json!(["1", "0", "-2"]));
        assert_eq!(j["den"], serde_json::json!(["1", "-2", "-2", "2"]));

        let catalan = [1i64, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786];
        let mut s = ptr::null_mut();
        assert_eq!(fibrgf_guess(catalan.as_ptr(), catalan.len(), 3, 6, &mut s), FibrgfStatus::NoFit);
        assert!(s.is_null());
        assert_eq!(fibrgf_guess(catalan.as_ptr(), 4, 3, 6, &mut s), FibrgfStatus::InvalidArgument);
    }
}

#[test]
fn verify_reports_json() {
    unsafe {
        let name = CString::new("q2").unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(fibrgf_verify(name.as_ptr(), &mut s), FibrgfStatus::Ok);
        let j: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(j["status"], "pass");

        let bad = CString::new("no-such-check").unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(fibrgf_verify(bad.as_ptr(), &mut s), FibrgfStatus::InvalidArgument);
        assert!(s.is_null());
        assert!(last_error().contains("no-such-check"));
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(fibrgf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/fibrgf.h");
    for f in [
        "fibrgf_product_kbonacci",
        "fibrgf_product_stern",
        "fibrgf_product_free",
        "fibrgf_product_degree",
        "fibrgf_product_coefficient",
        "fibrgf_product_corr_sum",
        "fibrgf_guess",
        "fibrgf_verify",
        "fibrgf_last_error",
        "fibrgf_string_free",
        "fibrgf_version",
        "FIBRGF_STATUS_NO_FIT = 6",
        "typedef struct FibrgfProduct FibrgfProduct",
    ] {
        assert!(header.contains(f), "{f} missing from the header");
    }
}
