//! The saddle equation `a(sigma) + log x = 0` and the estimates built on its root.

use crate::error::{Error, Result};
use crate::series::Series;
use serde::Serialize;
use std::f64::consts::PI;

/// Default residual tolerance for [`solve_saddle`].
pub const DEFAULT_TOL: f64 = 1e-12;
/// Iteration cap for the safeguarded Newton/bisection loop.
pub const MAX_STEPS: usize = 200;
/// Deepest offset `2^-k` tried when bracketing toward `alpha`.
const MAX_HALVINGS: i32 = 1000;
/// Largest offset `2^j` tried when bracketing away from `alpha`.
const MAX_DOUBLINGS: i32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleSolution {
    pub x: f64,
    pub sigma_x: f64,
    /// `sigma_x - alpha`, kept separately since `sigma_x` itself may round to `alpha`.
    pub offset: f64,
    pub residual: f64,
    /// Final bracket in `sigma`.
    pub bracket: (f64, f64),
    pub iterations: usize,
}

fn no_saddle(x: f64, reason: impl Into<String>) -> Error {
    Error::NoSaddle { x, reason: reason.into() }
}

/// `(a + log x, b)` at offset `eps`.
fn eval(series: &Series, eps: f64, lx: f64) -> Result<(f64, f64)> {
    let j = series.real_jet_at(eps)?;
    Ok((j[1] + lx, j[2]))
}

/// Root of `a(sigma) + log x` by bracket expansion in offsets from `alpha + 1`, then
/// Newton steps safeguarded by bisection.
pub fn solve_saddle(series: &Series, x: f64, tol: f64) -> Result<SaddleSolution> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Invalid(format!("x = {x} must be a positive finite real")));
    }
    solve_saddle_ln(series, x.ln(), tol)
}

/// [`solve_saddle`] given `log x`, for `x` beyond `f64` range.
pub fn solve_saddle_ln(series: &Series, lx: f64, tol: f64) -> Result<SaddleSolution> {
    if !lx.is_finite() {
        return Err(Error::Invalid(format!("log x = {lx} must be finite")));
    }
    if !(tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance {tol} must be positive")));
    }
    let x = lx.exp();
    let alpha = series.alpha();
    let min = series.min_offset();

    // expand upward until a + log x > 0
    let mut hi = None;
    for j in 0..=MAX_DOUBLINGS {
        let eps = 2f64.powi(j);
        match eval(series, eps, lx) {
            Ok((f, _)) if f > 0.0 => {
                hi = Some(eps);
                break;
            }
            Ok(_) => {}
            Err(_) => break,
        }
    }
    let Some(mut hi) = hi else {
        return Err(no_saddle(x, "a(sigma) + log x stays <= 0 for sigma - alpha up to 2^64 (x below x0)"));
    };
    // and downward until a + log x < 0
    let mut lo = None;
    let mut k = if hi > 1.0 { -(hi.log2() as i32) + 1 } else { 0 };
    while k <= MAX_HALVINGS {
        let eps = 2f64.powi(-k);
        if eps < min {
            break;
        }
        match eval(series, eps, lx) {
            Ok((f, _)) if f < 0.0 => {
                lo = Some(eps);
                break;
            }
            Ok((f, _)) if f > 0.0 => hi = hi.min(eps),
            Ok(_) => {
                return Ok(SaddleSolution { x, sigma_x: alpha + eps, offset: eps, residual: 0.0, bracket: (alpha + eps, alpha + eps), iterations: 0 })
            }
            Err(_) => break,
        }
        k += 1;
    }
    let Some(mut lo) = lo else {
        return Err(no_saddle(
            x,
            format!("a(sigma) + log x stays >= 0 down to sigma - alpha = {:e}; series has no saddle for this x", min.max(2f64.powi(-k.min(MAX_HALVINGS)))),
        ));
    };

    let mut eps = if hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
    let (mut f, mut b) = eval(series, eps, lx)?;
    let mut iterations = 1;
    while f.abs() > tol {
        if iterations >= MAX_STEPS {
            return Err(Error::Convergence(format!(
                "saddle solve for x = {x} stopped after {MAX_STEPS} steps with residual {:e}",
                f.abs()
            )));
        }
        if f < 0.0 {
            lo = eps;
        } else {
            hi = eps;
        }
        let newton = eps - f / b;
        let next = if b > 0.0 && newton > lo && newton < hi {
            newton
        } else if hi / lo > 4.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if next == eps || !(next > lo && next < hi) {
            // bracket exhausted at double resolution
            break;
        }
        eps = next;
        (f, b) = eval(series, eps, lx)?;
        iterations += 1;
    }
    // polish: Newton steps that keep reducing the residual
    for _ in 0..4 {
        if !(b > 0.0) {
            break;
        }
        let cand = eps - f / b;
        if !(cand > 0.0) || cand == eps {
            break;
        }
        let Ok((fc, bc)) = eval(series, cand, lx) else { break };
        if fc.abs() >= f.abs() {
            break;
        }
        (eps, f, b) = (cand, fc, bc);
        iterations += 1;
    }
    if f.abs() > tol {
        return Err(Error::Convergence(format!(
            "saddle for x = {x} bracketed in sigma - alpha in [{lo:e}, {hi:e}] but residual {:e} exceeds {tol:e}",
            f.abs()
        )));
    }
    if !(b > 0.0) {
        return Err(no_saddle(x, format!("b(sigma) = {b} <= 0 at the root; a is not increasing there")));
    }
    Ok(SaddleSolution { x, sigma_x: alpha + eps, offset: eps, residual: f.abs(), bracket: (alpha + lo, alpha + hi), iterations })
}

/// Saddle-point estimates of `F-hat(x)` and `F(x)` with exact comparisons where available.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub x: f64,
    pub sigma_used: f64,
    /// `a(sigma) + log x`; zero up to the solver tolerance at the saddle.
    pub residual: f64,
    /// `exp(-(a + log x)^2 / (2 b))`.
    pub gaussian_factor: f64,
    pub hat_estimate: f64,
    /// Natural log of `hat_estimate`, finite even when the estimate overflows.
    pub ln_hat_estimate: f64,
    pub exact_hat: Option<f64>,
    /// `hat_estimate / exact_hat - 1`.
    pub rel_err_hat: Option<f64>,
    /// `R(x, sigma) = exact_hat / prefactor - gaussian_factor`.
    pub observed_r: Option<f64>,
    pub f_estimate: Option<f64>,
    /// `(alpha + 1) / x * hat_estimate`.
    pub f_estimate_alt: Option<f64>,
    pub exact_f: Option<f64>,
    pub rel_err_f: Option<f64>,
}

/// Exact oracles, when the series carries coefficients up to `x`.
fn exact(series: &Series, x: f64) -> (Option<f64>, Option<f64>) {
    match series.coefficients() {
        Some(c) if x >= 1.0 && x <= c.len() as f64 => (c.hat_f(x).ok(), c.partial_sum(x).ok()),
        _ => (None, None),
    }
}

fn rel_err(est: f64, exact: Option<f64>) -> Option<f64> {
    exact.filter(|e| *e != 0.0).map(|e| est / e - 1.0)
}

/// Main term `x^{sigma+1} F(sigma) / (sigma (sigma+1) sqrt(2 pi b)) * exp(-(a + log x)^2 / (2b))`
/// at `sigma` (default: the saddle point).
pub fn estimate_hat(series: &Series, x: f64, sigma: Option<f64>) -> Result<EstimateReport> {
    let eps = match sigma {
        Some(s) => s - series.alpha(),
        None => solve_saddle(series, x, DEFAULT_TOL)?.offset,
    };
    hat_at_offset(series, x, eps)
}

fn hat_at_offset(series: &Series, x: f64, eps: f64) -> Result<EstimateReport> {
    if !(x > 0.0) {
        return Err(Error::Invalid(format!("x = {x} must be positive")));
    }
    let [h, a, b, _] = series.real_jet_at(eps)?;
    if !(b > 0.0) {
        return Err(Error::Domain(format!("b(sigma) = {b} <= 0 at sigma - alpha = {eps}; sigma lies outside (alpha, beta)")));
    }
    let sigma = series.alpha() + eps;
    let lx = x.ln();
    let ln_pref = (sigma + 1.0) * lx + h - sigma.ln() - (sigma + 1.0).ln() - 0.5 * (2.0 * PI * b).ln();
    let residual = a + lx;
    let ln_gauss = -residual * residual / (2.0 * b);
    let gaussian_factor = ln_gauss.exp();
    let ln_hat = ln_pref + ln_gauss;
    let hat_estimate = ln_hat.exp();
    let (exact_hat, _) = exact(series, x);
    let observed_r = exact_hat.map(|e| e / ln_pref.exp() - gaussian_factor);
    Ok(EstimateReport {
        x,
        sigma_used: sigma,
        residual,
        gaussian_factor,
        hat_estimate,
        ln_hat_estimate: ln_hat,
        exact_hat,
        rel_err_hat: rel_err(hat_estimate, exact_hat),
        observed_r,
        f_estimate: None,
        f_estimate_alt: None,
        exact_f: None,
        rel_err_f: None,
    })
}

/// `F(x) ~ x^{sigma_x} F(sigma_x) / (sigma_x sqrt(2 pi b(sigma_x)))`, together with the
/// `F-hat` estimate at the same saddle point.
pub fn estimate_f(series: &Series, x: f64) -> Result<EstimateReport> {
    let sol = solve_saddle(series, x, DEFAULT_TOL)?;
    let mut rep = hat_at_offset(series, x, sol.offset)?;
    let [h, _, b, _] = series.real_jet_at(sol.offset)?;
    let sigma = rep.sigma_used;
    let f_est = (sigma * x.ln() + h - sigma.ln() - 0.5 * (2.0 * PI * b).ln()).exp();
    let (_, exact_f) = exact(series, x);
    rep.f_estimate = Some(f_est);
    rep.f_estimate_alt = Some((series.alpha() + 1.0) / x * rep.hat_estimate);
    rep.exact_f = exact_f;
    rep.rel_err_f = rel_err(f_est, exact_f);
    Ok(rep)
}

/// Observed and predicted growth ratio `F-hat(xy) / F-hat(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RvRatio {
    pub x: f64,
    pub y: f64,
    pub observed: f64,
    /// The limit `y^{alpha+1}`.
    pub predicted: f64,
    /// `y^{sigma_x+1} exp(-(log y)^2 / (2 b(sigma_x)))`.
    pub finite_x_prediction: Option<f64>,
}

pub fn rv_ratio_check(series: &Series, x: f64, y: f64) -> Result<RvRatio> {
    if !(y > 0.0) {
        return Err(Error::Invalid(format!("y = {y} must be positive")));
    }
    let Some(c) = series.coefficients() else {
        return Err(Error::Invalid(format!("'{}' has no coefficients for the exact F-hat oracle", series.label())));
    };
    let hx = c.hat_f(x)?;
    let hxy = c.hat_f(x * y)?;
    if hx == 0.0 {
        return Err(Error::Domain(format!("F-hat({x}) = 0; the ratio is undefined")));
    }
    let finite_x_prediction = solve_saddle(series, x, DEFAULT_TOL).ok().and_then(|sol| {
        let b = series.real_jet_at(sol.offset).ok()?[2];
        let ly = y.ln();
        Some(y.powf(sol.sigma_x + 1.0) * (-ly * ly / (2.0 * b)).exp())
    });
    Ok(RvRatio { x, y, observed: hxy / hx, predicted: y.powf(series.alpha() + 1.0), finite_x_prediction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::series::{CoefficientSeries, ClosedFormSeries, ConstantForm};
    use std::sync::Arc;

    fn geom2() -> Series {
        catalog::make_exp_geometric(2).unwrap().series
    }

    #[test]
    fn geometric_saddle_at_one_for_x_four() {
        // a_2(1) = -2 log 2 = -log 4
        let sol = solve_saddle(&geom2(), 4.0, DEFAULT_TOL).unwrap();
        assert!((sol.sigma_x - 1.0).abs() < 1e-12, "{sol:?}");
        assert!(sol.residual < 1e-12);
        assert!(sol.bracket.0 <= sol.sigma_x && sol.sigma_x <= sol.bracket.1);
    }

    #[test]
    fn constructed_inverse() {
        let s = catalog::make_exp_zeta(0.0).unwrap().series;
        for sigma0 in [1.001, 1.1, 1.7, 2.9] {
            let a = s.eval_derivatives(sigma0).unwrap().0;
            let sol = solve_saddle_ln(&s, -a, DEFAULT_TOL).unwrap();
            assert!((sol.sigma_x - sigma0).abs() < 1e-10, "{sigma0}: {sol:?}");
        }
    }

    #[test]
    fn no_saddle_below_x0() {
        let s = geom2();
        assert!(matches!(solve_saddle(&s, 1.0, DEFAULT_TOL), Err(Error::NoSaddle { .. })));
        assert!(matches!(solve_saddle(&s, 0.5, DEFAULT_TOL), Err(Error::NoSaddle { .. })));
        // H constant: a = 0 everywhere
        let flat = Series::ClosedForm(ClosedFormSeries::new("flat", 0.0, Arc::new(ConstantForm(1.0))));
        assert!(matches!(estimate_f(&flat, 10.0), Err(Error::NoSaddle { .. })));
    }

    #[test]
    fn truncated_zeta_has_no_saddle_for_huge_x() {
        // a(alpha + margin) is finite for a truncated series
        let s = Series::Coefficients(CoefficientSeries::ones(100));
        assert!(solve_saddle(&s, 1e300, DEFAULT_TOL).is_err());
        assert!(solve_saddle(&s, 10.0, DEFAULT_TOL).is_ok());
    }

    #[test]
    fn gaussian_factor_is_one_at_saddle() {
        let s = geom2();
        let r = estimate_hat(&s, 1e3, None).unwrap();
        assert!((r.gaussian_factor - 1.0).abs() < 1e-20);
        let sol = solve_saddle(&s, 1e3, DEFAULT_TOL).unwrap();
        let again = estimate_hat(&s, 1e3, Some(sol.sigma_x)).unwrap();
        assert_eq!(r.hat_estimate, again.hat_estimate);
        let off = estimate_hat(&s, 1e3, Some(sol.sigma_x + 0.1)).unwrap();
        assert!(off.gaussian_factor < 1.0);
    }

    #[test]
    fn hat_at_one_has_r_equal_to_minus_gaussian() {
        let e = catalog::make_exp_geometric(2).unwrap().with_coefficients(64).unwrap();
        let r = estimate_hat(&e.series, 1.0, Some(0.5)).unwrap();
        assert_eq!(r.exact_hat, Some(0.0));
        assert!((r.observed_r.unwrap() + r.gaussian_factor).abs() < 1e-15);
    }

    #[test]
    fn domain_error_when_b_not_positive() {
        let flat = Series::ClosedForm(ClosedFormSeries::new("flat", 0.0, Arc::new(ConstantForm(1.0))));
        assert!(matches!(estimate_hat(&flat, 10.0, Some(1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn unit_ratio() {
        let e = catalog::make_exp_zeta(0.0).unwrap().with_coefficients(1000).unwrap();
        let r = rv_ratio_check(&e.series, 100.0, 1.0).unwrap();
        assert_eq!(r.observed, 1.0);
        assert_eq!(r.predicted, 1.0);
        assert!(rv_ratio_check(&e.series, 600.0, 2.0).is_err());
    }
}
