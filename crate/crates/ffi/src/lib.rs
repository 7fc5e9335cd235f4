//! C ABI over `dsaddle`.
//!
//! Series live behind an opaque `DsSeries` handle. Every call returns a `DsStatus`; on
//! failure `ds_last_error` gives the message for the calling thread. Strings handed out
//! by the library must be released with `ds_string_free`.

use dsaddle::admissibility::{default_delta, diagnose, Grid};
use dsaddle::catalog::{self, CatalogEntry};
use dsaddle::perron::{perron_hat, ContourSpec};
use dsaddle::saddlepoint::{estimate_hat, solve_saddle};
use dsaddle::series::{CoefficientSeries, Series};
use dsaddle::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsStatus {
    Ok = 0,
    NullPointer = 1,
    Utf8 = 2,
    Invalid = 3,
    Domain = 4,
    Range = 5,
    NoSaddle = 6,
    Convergence = 7,
    Parse = 8,
    Io = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

/// Opaque series handle.
pub struct DsSeries {
    series: Series,
    entry: Option<CatalogEntry>,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DsSaddle {
    pub sigma: f64,
    pub residual: f64,
    pub iterations: u32,
}

/// Saddle-point estimate of `F-hat(x)`; `exact` and `rel_err` are NaN without coefficients up to `x`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DsEstimate {
    pub sigma: f64,
    pub estimate: f64,
    pub exact: f64,
    pub rel_err: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DsPerron {
    pub value: f64,
    pub tail_bound: f64,
    pub t_used: f64,
    pub converged: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DsStatus {
    match e {
        Error::Domain(_) => DsStatus::Domain,
        Error::Range(_) | Error::OutOfRange { .. } => DsStatus::Range,
        Error::NoSaddle { .. } => DsStatus::NoSaddle,
        Error::Convergence(_) => DsStatus::Convergence,
        Error::Parse { .. } => DsStatus::Parse,
        Error::Io(_) => DsStatus::Io,
        _ => DsStatus::Invalid,
    }
}

/// Run `f`, translating errors and panics into a status and the thread's error message.
fn guard(f: impl FnOnce() -> Result<(), (DsStatus, String)>) -> DsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            DsStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            DsStatus::Panic
        }
    }
}

fn lib<T>(r: dsaddle::Result<T>) -> Result<T, (DsStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (DsStatus, String) {
    (DsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn series_ref<'a>(p: *const DsSeries) -> Result<&'a DsSeries, (DsStatus, String)> {
    p.as_ref().ok_or_else(|| null("series"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (DsStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (DsStatus::Utf8, format!("{what} is not UTF-8")))
}

/// Message for the last failed call on this thread, or null. Free with `ds_string_free`.
#[no_mangle]
pub extern "C" fn ds_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn ds_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build a catalog series from its key. `n > 0` also generates coefficients up to `n`.
///
/// # Safety
/// `key` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_series_from_key(key: *const c_char, n: usize, out: *mut *mut DsSeries) -> DsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let key = str_arg(key, "key")?;
        let mut entry = lib(catalog::from_key(key))?;
        if n > 0 {
            entry = lib(entry.with_coefficients(n))?;
        }
        let handle = Box::new(DsSeries { series: entry.series.clone(), entry: Some(entry) });
        *out = Box::into_raw(handle);
        Ok(())
    })
}

/// Build a series from `f(1..=len)` with abscissa `alpha`.
///
/// # Safety
/// `coeffs` must point to `len` doubles and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_series_from_coefficients(coeffs: *const f64, len: usize, alpha: f64, out: *mut *mut DsSeries) -> DsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if coeffs.is_null() {
            return Err(null("coeffs"));
        }
        let values = std::slice::from_raw_parts(coeffs, len).to_vec();
        let c = lib(CoefficientSeries::new(values, alpha, "ffi"))?;
        *out = Box::into_raw(Box::new(DsSeries { series: Series::Coefficients(c), entry: None }));
        Ok(())
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `s` must come from a `ds_series_*` constructor and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn ds_series_free(s: *mut DsSeries) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_series_alpha(s: *const DsSeries, out: *mut f64) -> DsStatus {
    guard(|| {
        let s = series_ref(s)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = s.series.alpha();
        Ok(())
    })
}

/// Copy the coefficients into `buf`. `*len` receives the count; with `buf` null or
/// `cap` too small nothing is copied and `BufferTooSmall` is returned (`buf` null only queries).
///
/// # Safety
/// `buf` must hold `cap` doubles when non-null; `len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ds_series_coefficients(s: *const DsSeries, buf: *mut f64, cap: usize, len: *mut usize) -> DsStatus {
    guard(|| {
        let s = series_ref(s)?;
        let len = len.as_mut().ok_or_else(|| null("len"))?;
        let c = s.series.coefficients().ok_or_else(|| (DsStatus::Invalid, "series has no coefficients".to_string()))?;
        *len = c.len();
        if buf.is_null() {
            return Ok(());
        }
        if cap < c.len() {
            return Err((DsStatus::BufferTooSmall, format!("need {} entries, buffer holds {cap}", c.len())));
        }
        ptr::copy_nonoverlapping(c.as_slice().as_ptr(), buf, c.len());
        Ok(())
    })
}

/// Solve `a(sigma) + log x = 0`.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_solve_saddle(s: *const DsSeries, x: f64, tol: f64, out: *mut DsSaddle) -> DsStatus {
    guard(|| {
        let s = series_ref(s)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let sol = lib(solve_saddle(&s.series, x, tol))?;
        *out = DsSaddle { sigma: sol.sigma_x, residual: sol.residual, iterations: sol.iterations as u32 };
        Ok(())
    })
}

/// Saddle-point estimate of `F-hat(x)` at the saddle.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_estimate_hat(s: *const DsSeries, x: f64, out: *mut DsEstimate) -> DsStatus {
    guard(|| {
        let s = series_ref(s)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = lib(estimate_hat(&s.series, x, None))?;
        *out = DsEstimate {
            sigma: r.sigma_used,
            estimate: r.hat_estimate,
            exact: r.exact_hat.unwrap_or(f64::NAN),
            rel_err: r.rel_err_hat.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Perron integral for `F-hat(x)` on `Re s = c`, starting at height `t_max`.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_perron_hat(s: *const DsSeries, x: f64, c: f64, t_max: f64, tol: f64, out: *mut DsPerron) -> DsStatus {
    guard(|| {
        let s = series_ref(s)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let spec = ContourSpec::new(c).with_t_max(t_max).with_tol(tol);
        let r = lib(perron_hat(&s.series, x, &spec))?;
        *out = DsPerron { value: r.value.re, tail_bound: r.tail_bound, t_used: r.t_used, converged: r.converged };
        Ok(())
    })
}

/// Admissibility report as JSON. `depth == 0` uses the catalog depth (20 for raw
/// coefficients). Catalog series use their own witness, others the default one.
///
/// # Safety
/// `s` must be a live handle and `json` a valid pointer; free the result with `ds_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ds_diagnose_json(s: *const DsSeries, depth: usize, json: *mut *mut c_char) -> DsStatus {
    guard(|| {
        let s = series_ref(s)?;
        if json.is_null() {
            return Err(null("json"));
        }
        let (witness, expected, k) = match &s.entry {
            Some(e) => (lib(e.witness())?, Some(e.expected), e.depth),
            None => (lib(default_delta(&s.series))?, None, 20),
        };
        let k = if depth == 0 { k } else { depth };
        let grid = Grid::geometric(s.series.alpha(), witness.beta_offset, k);
        let d = lib(diagnose(&s.series, &witness, &grid, expected))?;
        let text = serde_json::to_string(&d).map_err(|e| (DsStatus::Io, e.to_string()))?;
        *json = CString::new(text).map_err(|e| (DsStatus::Io, e.to_string()))?.into_raw();
        Ok(())
    })
}
