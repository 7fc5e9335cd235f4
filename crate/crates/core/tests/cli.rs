use std::path::PathBuf;
use std::process::{Command, Output};

fn dsaddle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsaddle")).args(args).env("DSADDLE_THREADS", "2").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("dsaddle_cli_{}_{name}", std::process::id()))
}

#[test]
fn coeffs_writes_divisor_counts() {
    let o = dsaddle(&["coeffs", "zeta_pow:2", "--N", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# alpha=1 "));
    assert!(text.lines().any(|l| l == "6 4"));
}

#[test]
fn coeffs_starts_exp_zeta_at_e() {
    let o = dsaddle(&["coeffs", "exp_zeta", "--N", "1000"]);
    let first = stdout(&o).lines().nth(1).unwrap().to_string();
    let v: f64 = first.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert_eq!(v, std::f64::consts::E);
}

#[test]
fn missing_series_is_a_usage_error() {
    let o = dsaddle(&["coeffs"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(dsaddle(&["estimate", "no_such", "--x", "10"]).status.code(), Some(2));
}

#[test]
fn huge_truncation_is_a_range_error() {
    assert_eq!(dsaddle(&["coeffs", "exp_zeta", "--N", "1000000000"]).status.code(), Some(3));
}

#[test]
fn estimate_marks_rows_without_a_saddle() {
    let o = dsaddle(&["estimate", "exp_zeta", "--N", "1000", "--x", "0.5,100"]);
    assert_eq!(o.status.code(), Some(4));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("5e-1,NO_SADDLE")));
    assert!(text.lines().any(|l| l.starts_with("1e2,ok,")));
}

#[test]
fn estimate_ratio_columns_and_json() {
    let o = dsaddle(&["estimate", "exp_zeta", "--N", "20000", "--x-decades", "1:3", "--rv", "y=2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], "1");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let gaps: Vec<f64> = rows.iter().map(|r| (r["rv"]["observed"].as_f64().unwrap() - 4.0).abs()).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn output_is_deterministic() {
    let args = ["estimate", "zeta_pow:2", "--N", "5000", "--x", "10,100,1000", "--rv", "2"];
    let a = dsaddle(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_dsaddle")).args(args).env("DSADDLE_THREADS", "1").output().unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn diagnose_geometric_and_product() {
    let o = dsaddle(&["diagnose", "exp_geom:2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["classification"], "ADMISSIBLE");
    assert_eq!(v["t"]["conditions"]["T3"]["verdict"], "FAIL_TREND");

    let o = dsaddle(&["diagnose", "--product", "exp_geom:2", "exp_geom:3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().any(|l| l == "A,A8,PASS_TREND"));
}

#[test]
fn diagnose_reports_mismatch_on_a_shallow_grid() {
    // at K = 12 the geometric trends have not emerged yet
    let o = dsaddle(&["diagnose", "exp_geom:2", "--sigma-grid", "12"]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn diagnose_coefficient_file_with_tables() {
    let coeffs = scratch("coeffs.txt");
    let delta = scratch("delta.txt");
    let o = dsaddle(&["coeffs", "zeta_pow:2", "--N", "4000", "--out", coeffs.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::write(&delta, "# offset delta\n0.05 0.2\n1 0.5\n").unwrap();
    let o = dsaddle(&["diagnose", "--coeff-file", coeffs.to_str().unwrap(), "--delta", delta.to_str().unwrap(), "--T", "b"]);
    let _ = std::fs::remove_file(&coeffs);
    let _ = std::fs::remove_file(&delta);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["witness_source"], "user");
    assert!(v["t"].is_object());
}

#[test]
fn perron_matches_exact_and_rejects_bad_contours() {
    let o = dsaddle(&["perron", "exp_zeta", "--N", "10000", "--x", "100", "--c", "1.5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["rows"][0]["rel_err"].as_f64().unwrap() < 1e-5);

    let o = dsaddle(&["perron", "exp_zeta", "--N", "100", "--x", "10", "--c", "0.9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("domain"));
}

#[test]
fn perron_reports_nonconvergence() {
    let o = dsaddle(&["perron", "exp_zeta", "--x", "50", "--c", "1.5", "--T", "10", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(6));
    assert!(stdout(&o).lines().nth(2).unwrap().ends_with(",false"));
}
