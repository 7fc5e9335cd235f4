//! Acceptance criteria, one PASS/FAIL line each. Run with `cargo test --test acceptance`.

use dsaddle::admissibility::{self, check_a, product, Grid, Verdict, A_CONDITIONS};
use dsaddle::catalog::{self, REGRESSION_KEYS};
use dsaddle::perron::{gaussian_integral, perron_hat, ContourSpec};
use dsaddle::saddlepoint::{estimate_hat, rv_ratio_check, solve_saddle, solve_saddle_ln};
use dsaddle::series::{dirichlet_exp, dirichlet_log, LogCoefficients, Series};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Plain divisor-sum convolution, kept independent of the library.
fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().min(b.len());
    let mut out = vec![0.0; n];
    for i in 1..=n {
        for j in 1..=n / i {
            out[i * j - 1] += a[i - 1] * b[j - 1];
        }
    }
    out
}

/// exp(H) as e^{h(1)} sum_k H0^{*k}/k!, H0 = H without its n = 1 term.
fn exp_oracle(h: &[f64]) -> Vec<f64> {
    let n = h.len();
    let mut h0 = h.to_vec();
    h0[0] = 0.0;
    let mut term = vec![0.0; n];
    term[0] = 1.0;
    let mut sum = term.clone();
    let mut k = 1.0;
    // H0^{*k} vanishes below 2^k
    while term.iter().any(|v| *v != 0.0) {
        term = convolve(&term, &h0).into_iter().map(|v| v / k).collect();
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
        k += 1.0;
    }
    sum.iter().map(|v| v * h[0].exp()).collect()
}

fn criterion_1() -> Outcome {
    const N: usize = 4096;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_exp, mut worst_log) = (0.0f64, 0.0f64);
    for trial in 0..50 {
        let density: f64 = rng.gen_range(0.05..1.0);
        let h: Vec<f64> = (1..=N)
            .map(|n| if n == 1 || rng.gen_bool(density) { rng.gen_range(0.0..2.0) } else { 0.0 })
            .collect();
        let log = LogCoefficients::new(h.clone(), format!("random{trial}")).unwrap();
        let f = dirichlet_exp(&log, 0.0).unwrap();
        let oracle = exp_oracle(&h);
        for (a, b) in f.as_slice().iter().zip(&oracle) {
            if *b != 0.0 {
                worst_exp = worst_exp.max((a - b).abs() / b.abs());
            } else {
                worst_exp = worst_exp.max(a.abs());
            }
        }
        let back = dirichlet_log(&f).unwrap();
        let scale = h.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in back.as_slice().iter().zip(&h) {
            worst_log = worst_log.max((a - b).abs() / scale);
        }
    }
    outcome(worst_exp < 1e-10 && worst_log < 1e-10, format!("max rel err exp {worst_exp:.2e}, log(exp) {worst_log:.2e}"))
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    let mut ok = true;
    for (key, n, c) in [("exp_zeta", 10_000usize, 1.5), ("exp_geom:2", 1 << 14, 0.5), ("zeta_pow:2", 10_000, 1.5)] {
        let entry = catalog::from_key(key).unwrap().with_coefficients(n).unwrap();
        let exact_series = entry.series.coefficients().unwrap().clone();
        for x in [10.0, 100.0, 1000.0] {
            let r = perron_hat(&entry.series, x, &ContourSpec::new(c).with_tol(1e-6)).unwrap();
            let exact = exact_series.hat_f(x).unwrap();
            let rel = ((r.value.re - exact).abs() + r.tail_bound) / exact;
            worst = worst.max(rel);
            ok &= r.converged && rel < 1e-5;
        }
    }
    outcome(ok, format!("max (|err| + tail)/exact {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    let mut worst_ratio = 0.0f64;
    let mut worst_large = 0.0f64;
    let mut count = 0;
    let mut ok = true;
    for lambda in [0.01, 0.1, 1.0, 10.0, 100.0] {
        for hs in [0.5, 2.0, 10.0, 50.0, 300.0] {
            let h = hs / f64::sqrt(lambda);
            for rho in [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0] {
                let kappa = 2.0 * lambda.sqrt() * rho * f64::min(hs, 3.0);
                let g = gaussian_integral(h, kappa, lambda).unwrap();
                count += 1;
                worst_ratio = worst_ratio.max(g.relative_gap / g.bound);
                ok &= g.within_bound();
                if hs > 200.0 {
                    worst_large = worst_large.max(g.relative_gap);
                    ok &= g.relative_gap < 0.01;
                }
            }
        }
    }
    outcome(ok && count == 100, format!("{count} points, worst gap/bound {worst_ratio:.3}, worst gap at h sqrt(lambda) > 200 {worst_large:.2e}"))
}

fn exp_zeta_million() -> Series {
    catalog::from_key("exp_zeta").unwrap().with_coefficients(1_000_000).unwrap().series
}

fn criterion_4(series: &Series) -> Outcome {
    let errs: Vec<f64> = [1e2, 1e3, 1e4, 1e5]
        .iter()
        .map(|&x| estimate_hat(series, x, None).unwrap().rel_err_hat.unwrap().abs())
        .collect();
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    let ok = decreasing && errs[3] < 0.25;
    outcome(ok, format!("|rel err| at x = 1e2..1e5: {}", fmt_list(&errs)))
}

fn criterion_5(series: &Series) -> Outcome {
    let c = series.coefficients().unwrap();
    let n = c.len() as f64;
    let xs = [1e1, 1e2, 1e3, 1e4, 1e5, n / 2.0];
    let mut gaps = Vec::new();
    let mut ratios = Vec::new();
    for &x in &xs {
        let rv = rv_ratio_check(series, x, 2.0).unwrap();
        gaps.push((rv.observed - rv.predicted).abs());
        let f = c.partial_sum(x).unwrap();
        let hat = c.hat_f(x).unwrap();
        ratios.push(f * x / ((series.alpha() + 1.0) * hat));
    }
    let gaps_down = gaps.windows(2).all(|w| w[1] < w[0]);
    let to_one = ratios.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs());
    // top decade: x in [N/20, N/2]
    let top: Vec<f64> = [n / 20.0, n / 10.0, n / 5.0, n / 2.0]
        .iter()
        .map(|&x| c.partial_sum(x).unwrap() * x / ((series.alpha() + 1.0) * c.hat_f(x).unwrap()))
        .collect();
    let in_band = top.iter().all(|r| (0.8..=1.25).contains(r));
    outcome(
        gaps_down && to_one && in_band,
        format!("|ratio - 4|: {}; F x/(2 F-hat): {}", fmt_list(&gaps), fmt_list(&ratios)),
    )
}

fn criterion_6() -> Outcome {
    let mut bad = Vec::new();
    for key in REGRESSION_KEYS {
        let entry = catalog::from_key(key).unwrap();
        let w = entry.witness().unwrap();
        let grid = Grid::geometric(entry.alpha(), w.beta_offset, entry.depth);
        let d = admissibility::diagnose(&entry.series, &w, &grid, Some(entry.expected)).unwrap();
        if !d.matched {
            bad.push(format!("{key}: {}", d.mismatches.join("; ")));
        }
    }
    let detail = if bad.is_empty() { format!("{} catalog entries, zero mismatches", REGRESSION_KEYS.len()) } else { bad.join(" | ") };
    outcome(bad.is_empty(), detail)
}

fn criterion_7() -> Outcome {
    const N: usize = 4096;
    let e2 = catalog::from_key("exp_geom:2").unwrap().with_coefficients(N).unwrap();
    let e3 = catalog::from_key("exp_geom:3").unwrap().with_coefficients(N).unwrap();
    let (prod, w) = product(&e2.series, &e2.witness().unwrap(), &e3.series, &e3.witness().unwrap()).unwrap();
    let grid = Grid::geometric(prod.alpha(), w.beta_offset, e2.depth.max(e3.depth));
    let rep = check_a(&prod, &w, &grid).unwrap();
    let failing: Vec<&str> = A_CONDITIONS.iter().copied().filter(|n| rep.verdict(n) != Some(Verdict::PassTrend)).collect();

    let mut worst_add = 0.0f64;
    for eps in grid.sigmas().iter().map(|s| s - prod.alpha()) {
        let (p, a, b) = (prod.real_jet_at(eps).unwrap(), e2.series.real_jet_at(eps).unwrap(), e3.series.real_jet_at(eps).unwrap());
        for i in 1..4 {
            let sum = a[i] + b[i];
            worst_add = worst_add.max((p[i] - sum).abs() / sum.abs().max(f64::MIN_POSITIVE));
        }
    }
    let oracle = convolve(e2.series.coefficients().unwrap().as_slice(), e3.series.coefficients().unwrap().as_slice());
    let coeffs_equal = prod.coefficients().is_some_and(|c| c.as_slice() == oracle.as_slice());
    outcome(
        failing.is_empty() && worst_add <= 1e-12 && coeffs_equal,
        format!("check_A failing: {failing:?}; max rel additivity gap {worst_add:.2e}; coefficients equal: {coeffs_equal}"),
    )
}

fn criterion_8() -> Outcome {
    let keys = ["exp_zeta", "exp_zeta_shift:1", "exp_zeta_pow:2", "exp_geom:2", "exp_geom:3", "zeta_pow:2", "zeta_y:5", "fg:2^1,3^2"];
    let series: Vec<Series> = keys.iter().map(|k| catalog::from_key(k).unwrap().series).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut pairs: Vec<Vec<(f64, f64)>> = vec![Vec::new(); keys.len()];
    let (mut worst_res, mut worst_inv) = (0.0f64, 0.0f64);
    let mut failures = 0;
    for i in 0..10_000 {
        let s = i % keys.len();
        if i % 2 == 0 {
            let lx = rng.gen_range(2f64.ln()..50.0);
            match solve_saddle(&series[s], lx.exp(), 1e-12) {
                Ok(sol) => {
                    worst_res = worst_res.max(sol.residual);
                    pairs[s].push((lx, sol.sigma_x));
                }
                Err(_) => failures += 1,
            }
        } else {
            let sigma0 = series[s].alpha() + rng.gen_range(0.02..2.0);
            let a = series[s].eval_derivatives(sigma0).unwrap().0;
            match solve_saddle_ln(&series[s], -a, 1e-12) {
                Ok(sol) => {
                    worst_res = worst_res.max(sol.residual);
                    worst_inv = worst_inv.max((sol.sigma_x - sigma0).abs());
                }
                Err(_) => failures += 1,
            }
        }
    }
    let mut monotone = true;
    for p in &mut pairs {
        p.sort_by(|a, b| a.0.total_cmp(&b.0));
        monotone &= p.windows(2).all(|w| w[1].1 <= w[0].1);
    }
    outcome(
        failures == 0 && worst_res < 1e-12 && worst_inv <= 1e-10 && monotone,
        format!("failures {failures}, max residual {worst_res:.2e}, max inverse err {worst_inv:.2e}, monotone {monotone}"),
    )
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ")
}

fn report(id: u32, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let o = f();
    println!(
        "{} criterion {id} ({name}): {} [{:.1}s]",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail,
        t.elapsed().as_secs_f64()
    );
    o.pass
}

fn main() {
    let mut all = true;
    all &= report(1, "coefficient transforms", criterion_1);
    all &= report(2, "perron vs exact", criterion_2);
    all &= report(3, "truncated gaussian", criterion_3);
    let big = exp_zeta_million();
    all &= report(4, "saddle-point asymptotics", || criterion_4(&big));
    all &= report(5, "regular variation", || criterion_5(&big));
    all &= report(6, "classification regression", criterion_6);
    all &= report(7, "product closure", criterion_7);
    all &= report(8, "saddle solver contract", criterion_8);
    println!("acceptance: {}", if all { "all criteria PASS" } else { "some criteria FAIL" });
    if !all {
        std::process::exit(1);
    }
}
