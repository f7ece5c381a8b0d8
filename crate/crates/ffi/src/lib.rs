//! C ABI over `s6v-core`.
//!
//! Objects are opaque handles created by `*_new` and released by `*_free`.
//! Every fallible call returns an [`S6vStatus`]; on failure
//! [`s6v_last_error`] describes what went wrong on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use s6v_core::kernels::{riemann_continuum_deriv, KernelTable, QuadratureOptions};
use s6v_core::{BoundarySpec, Error, HeightConvention, LatticeSample, ModelParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum S6vStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    InvalidBoundary = 3,
    OutOfRange = 4,
    Numerical = 5,
    Panic = 6,
}

/// Model parameters `(L, beta1, beta2)` with derived weights.
pub struct S6vParams(ModelParams);

/// One sampled configuration with heights.
pub struct S6vSample(LatticeSample);

/// Discrete kernel `R^d` on `[0, X] x [0, Y]`.
pub struct S6vKernelTable(KernelTable);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> S6vStatus {
    match e {
        Error::InvalidParameter(_) | Error::Config(_) => S6vStatus::InvalidParameter,
        Error::InvalidBoundary(_) | Error::IncompatibleCorner { .. } => S6vStatus::InvalidBoundary,
        Error::OutOfWindow { .. } => S6vStatus::OutOfRange,
        _ => S6vStatus::Numerical,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (S6vStatus, String)>) -> S6vStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => S6vStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            S6vStatus::Panic
        }
    }
}

fn core<T>(r: s6v_core::Result<T>) -> Result<T, (S6vStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (S6vStatus, String) {
    (S6vStatus::NullPointer, format!("{what} is null"))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (S6vStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (S6vStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message for the most recent failure on this thread, or an empty string.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn s6v_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Crate version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn s6v_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be a valid pointer; the handle it receives must be released
/// with [`s6v_params_free`].
#[no_mangle]
pub unsafe extern "C" fn s6v_params_new(scale: u32, beta1: f64, beta2: f64, out: *mut *mut S6vParams) -> S6vStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let p = core(ModelParams::new(scale, beta1, beta2))?;
        *out = Box::into_raw(Box::new(S6vParams(p)));
        Ok(())
    })
}

/// # Safety
/// `params` must be null or a handle from [`s6v_params_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn s6v_params_free(params: *mut S6vParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Vertex weights `b1`, `b2`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn s6v_params_weights(params: *const S6vParams, b1: *mut f64, b2: *mut f64) -> S6vStatus {
    guard(|| {
        let p = &handle(params, "params")?.0;
        *out_ref(b1, "b1")? = p.b1();
        *out_ref(b2, "b2")? = p.b2();
        Ok(())
    })
}

/// Samples the step boundary on `[0, x_extent] x [0, y_extent]` with the
/// replica stream `(seed, replica)`.
///
/// # Safety
/// `params` must be a live handle and `out` a valid pointer; the result must
/// be released with [`s6v_sample_free`].
#[no_mangle]
pub unsafe extern "C" fn s6v_sample_step(
    params: *const S6vParams,
    x_extent: usize,
    y_extent: usize,
    seed: u64,
    replica: u64,
    out: *mut *mut S6vSample,
) -> S6vStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let p = &handle(params, "params")?.0;
        let bc = core(BoundarySpec::Step.build(x_extent, y_extent))?;
        let s = core(s6v_core::sample_replica(p, &bc, x_extent, y_extent, seed, replica))?
            .with_convention(HeightConvention::Standard);
        *out = Box::into_raw(Box::new(S6vSample(s)));
        Ok(())
    })
}

/// # Safety
/// `sample` must be null or a handle from [`s6v_sample_step`], freed once.
#[no_mangle]
pub unsafe extern "C" fn s6v_sample_free(sample: *mut S6vSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

/// Height `H(x, y)` of a sample.
///
/// # Safety
/// `sample` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn s6v_sample_height(sample: *const S6vSample, x: usize, y: usize, out: *mut i32) -> S6vStatus {
    guard(|| {
        let s = &handle(sample, "sample")?.0;
        let out = out_ref(out, "out")?;
        if x > s.x_extent() || y > s.y_extent() {
            return Err((S6vStatus::OutOfRange, format!("({x}, {y}) outside the sample")));
        }
        *out = s.height(x, y);
        Ok(())
    })
}

/// `phi(x, y) = q^H(x, y)` of a sample.
///
/// # Safety
/// `sample` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn s6v_sample_phi(sample: *const S6vSample, x: usize, y: usize, out: *mut f64) -> S6vStatus {
    guard(|| {
        let s = &handle(sample, "sample")?.0;
        let out = out_ref(out, "out")?;
        if x > s.x_extent() || y > s.y_extent() {
            return Err((S6vStatus::OutOfRange, format!("({x}, {y}) outside the sample")));
        }
        *out = s.phi(x, y);
        Ok(())
    })
}

/// # Safety
/// `params` must be a live handle and `out` a valid pointer; the result must
/// be released with [`s6v_kernel_table_free`].
#[no_mangle]
pub unsafe extern "C" fn s6v_kernel_table_new(
    params: *const S6vParams,
    x_extent: usize,
    y_extent: usize,
    out: *mut *mut S6vKernelTable,
) -> S6vStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let p = &handle(params, "params")?.0;
        *out = Box::into_raw(Box::new(S6vKernelTable(KernelTable::build(p, x_extent, y_extent))));
        Ok(())
    })
}

/// # Safety
/// `table` must be null or a handle from [`s6v_kernel_table_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn s6v_kernel_table_free(table: *mut S6vKernelTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// `R^d(x, y)`.
///
/// # Safety
/// `table` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn s6v_kernel_table_get(
    table: *const S6vKernelTable,
    x: usize,
    y: usize,
    out: *mut f64,
) -> S6vStatus {
    guard(|| {
        let t = &handle(table, "table")?.0;
        let out = out_ref(out, "out")?;
        if x > t.x_extent() || y > t.y_extent() {
            return Err((S6vStatus::OutOfRange, format!("({x}, {y}) outside the table")));
        }
        *out = t.get(x, y);
        Ok(())
    })
}

/// Continuum kernel derivative `d_x^kx d_y^ky R(x, y)` by contour quadrature.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn s6v_riemann_continuum(
    beta1: f64,
    beta2: f64,
    kx: u32,
    ky: u32,
    x: f64,
    y: f64,
    out: *mut f64,
) -> S6vStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = core(riemann_continuum_deriv(
            beta1,
            beta2,
            (kx, ky),
            x,
            y,
            &QuadratureOptions::default(),
        ))?;
        Ok(())
    })
}
