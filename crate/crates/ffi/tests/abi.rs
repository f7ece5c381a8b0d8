use std::ffi::CStr;
use std::ptr;

use s6v_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(s6v_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn params_round_trip() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { s6v_params_new(16, 2.0, 1.0, &mut p) }, S6vStatus::Ok);
    let (mut b1, mut b2) = (0.0, 0.0);
    assert_eq!(unsafe { s6v_params_weights(p, &mut b1, &mut b2) }, S6vStatus::Ok);
    assert!((b1 - (-2.0f64 / 16.0).exp()).abs() < 1e-15);
    assert!((b2 - (-1.0f64 / 16.0).exp()).abs() < 1e-15);
    unsafe { s6v_params_free(p) };
}

#[test]
fn invalid_parameters_report_a_message() {
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { s6v_params_new(16, 1.0, 1.0, &mut p) },
        S6vStatus::InvalidParameter
    );
    assert!(p.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(
        unsafe { s6v_params_weights(ptr::null(), ptr::null_mut(), ptr::null_mut()) },
        S6vStatus::NullPointer
    );
    assert!(last_error().contains("null"));
}

#[test]
fn sample_and_kernel_handles() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { s6v_params_new(8, 2.0, 1.0, &mut p) }, S6vStatus::Ok);

    let mut s = ptr::null_mut();
    assert_eq!(unsafe { s6v_sample_step(p, 10, 10, 7, 0, &mut s) }, S6vStatus::Ok);
    let mut h = 0;
    assert_eq!(unsafe { s6v_sample_height(s, 0, 4, &mut h) }, S6vStatus::Ok);
    assert_eq!(h, -4);
    let mut phi = 0.0;
    assert_eq!(unsafe { s6v_sample_phi(s, 0, 0, &mut phi) }, S6vStatus::Ok);
    assert_eq!(phi, 1.0);
    assert_eq!(unsafe { s6v_sample_height(s, 11, 0, &mut h) }, S6vStatus::OutOfRange);

    let mut t = ptr::null_mut();
    assert_eq!(unsafe { s6v_kernel_table_new(p, 5, 5, &mut t) }, S6vStatus::Ok);
    let (mut v, mut b1, mut b2) = (0.0, 0.0, 0.0);
    unsafe { s6v_params_weights(p, &mut b1, &mut b2) };
    assert_eq!(unsafe { s6v_kernel_table_get(t, 3, 0, &mut v) }, S6vStatus::Ok);
    assert!((v - b1.powi(3)).abs() < 1e-15);
    assert_eq!(unsafe { s6v_kernel_table_get(t, 6, 0, &mut v) }, S6vStatus::OutOfRange);

    unsafe {
        s6v_kernel_table_free(t);
        s6v_sample_free(s);
        s6v_params_free(p);
        s6v_sample_free(ptr::null_mut());
    }
}

#[test]
fn continuum_kernel_on_axis() {
    let mut v = 0.0;
    assert_eq!(
        unsafe { s6v_riemann_continuum(2.0, 1.0, 0, 0, 0.5, 0.0, &mut v) },
        S6vStatus::Ok
    );
    assert!((v - (-1.0f64).exp()).abs() < 1e-10);
    assert_eq!(
        unsafe { s6v_riemann_continuum(1.0, 1.0, 0, 0, 0.5, 0.5, &mut v) },
        S6vStatus::InvalidParameter
    );
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/s6v.h")).unwrap();
    for name in [
        "s6v_params_new",
        "s6v_sample_step",
        "s6v_kernel_table_get",
        "s6v_riemann_continuum",
        "S6vParams",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
    let v = unsafe { CStr::from_ptr(s6v_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
