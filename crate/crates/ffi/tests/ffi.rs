use dsaddle_ffi::*;
use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

fn from_key(key: &str, n: usize) -> *mut DsSeries {
    let key = CString::new(key).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ds_series_from_key(key.as_ptr(), n, &mut out) }, DsStatus::Ok);
    assert!(!out.is_null());
    out
}

fn last_error() -> String {
    let p = ds_last_error();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { ds_string_free(p) };
    s
}

#[test]
fn saddle_and_estimate_through_the_abi() {
    let s = from_key("exp_geom:2", 4096);
    let mut sol = DsSaddle::default();
    assert_eq!(unsafe { ds_solve_saddle(s, 4.0, 1e-12, &mut sol) }, DsStatus::Ok);
    assert!((sol.sigma - 1.0).abs() < 1e-10);
    assert!(sol.residual < 1e-12);

    let mut est = DsEstimate::default();
    assert_eq!(unsafe { ds_estimate_hat(s, 100.0, &mut est) }, DsStatus::Ok);
    assert!(est.exact > 0.0 && est.rel_err.is_finite());

    let mut alpha = f64::NAN;
    assert_eq!(unsafe { ds_series_alpha(s, &mut alpha) }, DsStatus::Ok);
    assert_eq!(alpha, 0.0);
    unsafe { ds_series_free(s) };
}

#[test]
fn coefficients_round_trip_and_buffer_checks() {
    let f = [1.0, 2.0, 0.0, 3.0];
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ds_series_from_coefficients(f.as_ptr(), f.len(), 0.0, &mut s) }, DsStatus::Ok);
    let mut len = 0usize;
    assert_eq!(unsafe { ds_series_coefficients(s, ptr::null_mut(), 0, &mut len) }, DsStatus::Ok);
    assert_eq!(len, 4);
    let mut small = [0.0; 2];
    assert_eq!(unsafe { ds_series_coefficients(s, small.as_mut_ptr(), 2, &mut len) }, DsStatus::BufferTooSmall);
    let mut buf = [0.0; 4];
    assert_eq!(unsafe { ds_series_coefficients(s, buf.as_mut_ptr(), 4, &mut len) }, DsStatus::Ok);
    assert_eq!(buf, f);
    unsafe { ds_series_free(s) };
}

#[test]
fn perron_matches_exact_sum() {
    let s = from_key("exp_geom:2", 1024);
    let mut r = DsPerron::default();
    assert_eq!(unsafe { ds_perron_hat(s, 100.0, 0.5, 64.0, 1e-8, &mut r) }, DsStatus::Ok);
    let mut est = DsEstimate::default();
    assert_eq!(unsafe { ds_estimate_hat(s, 100.0, &mut est) }, DsStatus::Ok);
    assert!(r.converged);
    assert!((r.value - est.exact).abs() < 1e-6 * est.exact);
    unsafe { ds_series_free(s) };
}

#[test]
fn errors_map_to_status_codes() {
    let mut out = ptr::null_mut();
    let bad = CString::new("nope").unwrap();
    assert_eq!(unsafe { ds_series_from_key(bad.as_ptr(), 0, &mut out) }, DsStatus::Invalid);
    assert!(last_error().contains("nope"));
    assert_eq!(unsafe { ds_series_from_key(ptr::null(), 0, &mut out) }, DsStatus::NullPointer);

    let s = from_key("exp_zeta", 0);
    let mut sol = DsSaddle::default();
    assert_eq!(unsafe { ds_solve_saddle(s, 0.5, 1e-12, &mut sol) }, DsStatus::NoSaddle);
    assert_eq!(unsafe { ds_solve_saddle(ptr::null(), 2.0, 1e-12, &mut sol) }, DsStatus::NullPointer);
    let mut alpha = 0.0;
    assert_eq!(unsafe { ds_series_alpha(s, &mut alpha) }, DsStatus::Ok);
    assert!(ds_last_error().is_null());
    unsafe { ds_series_free(s) };
    unsafe { ds_series_free(ptr::null_mut()) };
}

#[test]
fn diagnose_returns_json() {
    let s = from_key("zeta_pow:2", 0);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { ds_diagnose_json(s, 20, &mut json) }, DsStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { ds_string_free(json) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], "1");
    assert_eq!(v["classification"], "NOT_ADMISSIBLE");
    unsafe { ds_series_free(s) };
}

/// Compile and run a C program against the generated header and the static library.
#[test]
fn c_program_links_against_header() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = manifest.join("include/dsaddle.h");
    assert!(std::fs::read_to_string(&header).unwrap().contains("ds_solve_saddle"));

    // target/<profile>/deps/<test exe> -> target/<profile>/libdsaddle_ffi.a
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libdsaddle_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let out = std::env::temp_dir().join(format!("dsaddle_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "smoke program exited with {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).contains("no_such_series"));
}
