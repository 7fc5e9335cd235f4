//! Truncated coefficient vectors and Dirichlet-convolution arithmetic.

use crate::error::{Error, Result};
use crate::jet::Jet;
use num_complex::Complex64 as C64;
use std::sync::{Arc, OnceLock};

/// Coefficients `f(1..=N)` of `F(s) = sum f(n) n^{-s}` with a declared abscissa.
#[derive(Debug, Clone)]
pub struct CoefficientSeries {
    coeffs: Arc<Vec<f64>>,
    alpha: f64,
    label: String,
    log: Arc<OnceLock<Result<LogCoefficients>>>,
}

/// Coefficients `h(1..=N)` of `H = log F`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogCoefficients {
    coeffs: Vec<f64>,
    label: String,
}

/// Value of a truncated Dirichlet sum plus a bound on the omitted tail, when one is available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: C64,
    pub tail_bound: Option<f64>,
}

impl CoefficientSeries {
    /// Build from `f(1), f(2), ...`. Coefficients must be finite and nonnegative.
    pub fn new(coeffs: Vec<f64>, alpha: f64, label: impl Into<String>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("coefficient series needs N >= 1".into()));
        }
        if let Some((i, v)) = coeffs.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::Invalid(format!("coefficient f({}) = {v} is not a finite nonnegative real", i + 1)));
        }
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::Invalid(format!("abscissa {alpha} must be a finite real >= 0")));
        }
        Ok(Self::from_parts(coeffs, alpha, label.into()))
    }

    fn from_parts(coeffs: Vec<f64>, alpha: f64, label: String) -> Self {
        CoefficientSeries { coeffs: Arc::new(coeffs), alpha, label, log: Arc::new(OnceLock::new()) }
    }

    /// The all-ones series (coefficients of zeta).
    pub fn ones(n: usize) -> Self {
        Self::from_parts(vec![1.0; n.max(1)], 1.0, "ones".into())
    }

    /// `(c, 0, 0, ...)`.
    pub fn unit(n: usize, c: f64) -> Result<Self> {
        let mut v = vec![0.0; n.max(1)];
        v[0] = c;
        Self::new(v, 0.0, "unit")
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    /// `f(n)` for `1 <= n <= N`, zero beyond.
    pub fn coeff(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        self.coeffs.get(n - 1).copied().unwrap_or(0.0)
    }

    /// Coefficients as a slice, index 0 holding `f(1)`.
    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    /// Truncate to the first `n` coefficients.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.clamp(1, self.len());
        Self::from_parts(self.coeffs[..n].to_vec(), self.alpha, self.label.clone())
    }

    /// `h = log F`, computed once and cached.
    pub fn log_coefficients(&self) -> Result<&LogCoefficients> {
        self.log.get_or_init(|| dirichlet_log(self)).as_ref().map_err(Clone::clone)
    }

    fn check_x(&self, x: f64) -> Result<usize> {
        if !(x >= 1.0) || x > self.len() as f64 {
            return Err(Error::OutOfRange { x, n: self.len() });
        }
        Ok(x.floor() as usize)
    }

    /// `F(x) = sum_{n <= x} f(n)`.
    pub fn partial_sum(&self, x: f64) -> Result<f64> {
        let m = self.check_x(x)?;
        Ok(self.coeffs[..m].iter().sum())
    }

    /// `F-hat(x) = integral_1^x F(u) du = sum_{n <= x} f(n) (x - n)`.
    pub fn hat_f(&self, x: f64) -> Result<f64> {
        let m = self.check_x(x)?;
        Ok(self.coeffs[..m].iter().enumerate().map(|(i, f)| f * (x - (i + 1) as f64)).sum())
    }

    /// Cahen-style estimate `max log F(x) / log x` over `x` in `[N/2, N]`.
    pub fn estimate_alpha(&self) -> Option<f64> {
        let n = self.len();
        if n < 8 {
            return None;
        }
        let mut run = 0.0;
        let mut best = f64::NEG_INFINITY;
        for (i, f) in self.coeffs.iter().enumerate() {
            run += f;
            let x = (i + 1) as f64;
            if i + 1 >= n / 2 && run > 0.0 {
                best = best.max(run.ln() / x.ln());
            }
        }
        best.is_finite().then_some(best.max(0.0))
    }

    fn check_domain(&self, re: f64) -> Result<()> {
        if !(re > self.alpha + MARGIN) {
            return Err(Error::Domain(format!(
                "Re(s) = {re} must exceed alpha + {MARGIN} = {} for a truncated series",
                self.alpha + MARGIN
            )));
        }
        Ok(())
    }

    /// Truncated sum `sum_{n <= N} f(n) n^{-s}` with the crude tail bound
    /// `max f * N^{1-Re s}/(Re s - 1)` when `Re s > 1`.
    pub fn eval(&self, s: C64) -> Result<Evaluation> {
        self.check_domain(s.re)?;
        let mut acc = C64::new(0.0, 0.0);
        for (i, &f) in self.coeffs.iter().enumerate() {
            if f != 0.0 {
                let l = ((i + 1) as f64).ln();
                acc += (-s * l).exp() * f;
            }
        }
        let tail_bound = (s.re > 1.0).then(|| {
            let fmax = self.coeffs.iter().cloned().fold(0.0, f64::max);
            fmax * (self.len() as f64).powf(1.0 - s.re) / (s.re - 1.0)
        });
        Ok(Evaluation { value: acc, tail_bound })
    }

    /// `F'(sigma) = -sum f(n) log n n^{-sigma}`.
    pub fn eval_derivative_real(&self, sigma: f64) -> Result<f64> {
        self.check_domain(sigma)?;
        Ok(self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let l = ((i + 1) as f64).ln();
                -f * l * (-sigma * l).exp()
            })
            .sum())
    }

    /// Jet of `H(s) = sum h(n) n^{-s}` at `s`.
    pub fn log_jet(&self, s: C64) -> Result<Jet> {
        self.check_domain(s.re)?;
        let h = self.log_coefficients()?;
        let mut acc = Jet::constant(C64::new(0.0, 0.0));
        for (i, &c) in h.coeffs.iter().enumerate() {
            if c != 0.0 {
                let l = ((i + 1) as f64).ln();
                acc = acc + Jet::pow_neg(l, (-s * l).exp() * c);
            }
        }
        Ok(acc)
    }
}

/// Evaluation margin to the right of the declared abscissa for truncated series.
pub const MARGIN: f64 = 0.05;

impl LogCoefficients {
    pub fn new(coeffs: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("log coefficients need N >= 1".into()));
        }
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("log coefficients must be finite".into()));
        }
        Ok(LogCoefficients { coeffs, label: label.into() })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn coeff(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        self.coeffs.get(n - 1).copied().unwrap_or(0.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }
}

/// Dirichlet convolution truncated at `min(N_f, N_g)`.
pub fn dirichlet_mul(f: &CoefficientSeries, g: &CoefficientSeries) -> CoefficientSeries {
    let n = f.len().min(g.len());
    let (a, b) = (f.as_slice(), g.as_slice());
    let mut out = vec![0.0; n];
    for d in 1..=n {
        let fd = a[d - 1];
        if fd == 0.0 {
            continue;
        }
        for m in 1..=n / d {
            out[d * m - 1] += fd * b[m - 1];
        }
    }
    let label = format!("({})*({})", f.label(), g.label());
    CoefficientSeries::from_parts(out, f.alpha().max(g.alpha()), label)
}

/// Coefficients of `exp(H)` via `f(n) log n = sum_{d | n, d > 1} h(d) log d f(n/d)`.
pub fn dirichlet_exp(h: &LogCoefficients, alpha: f64) -> Result<CoefficientSeries> {
    let f = dirichlet_exp_signed(h)?;
    // rounding can leave tiny negatives where cancellation produces exact zeros
    let scale = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let coeffs: Vec<f64> = f.into_iter().map(|v| if v < 0.0 && v > -1e-14 * scale { 0.0 } else { v }).collect();
    if let Some(i) = coeffs.iter().position(|v| *v < 0.0) {
        return Err(Error::Domain(format!(
            "exp(H) has negative coefficient f({}) = {}",
            i + 1,
            coeffs[i]
        )));
    }
    Ok(CoefficientSeries::from_parts(coeffs, alpha, format!("exp({})", h.label())))
}

/// Coefficients of `exp(H)` without the nonnegativity requirement on the result.
pub fn dirichlet_exp_signed(h: &LogCoefficients) -> Result<Vec<f64>> {
    let n = h.len();
    let f1 = h.coeffs[0].exp();
    if !f1.is_finite() {
        return Err(Error::Range(format!("exp(h(1)) overflows for h(1) = {}", h.coeffs[0])));
    }
    let hl: Vec<f64> = (1..=n).map(|d| h.coeffs[d - 1] * (d as f64).ln()).collect();
    let mut acc = vec![0.0; n + 1];
    let mut f = vec![0.0; n];
    f[0] = f1;
    for m in 1..=n {
        if m >= 2 {
            f[m - 1] = acc[m] / (m as f64).ln();
        }
        let fm = f[m - 1];
        if fm == 0.0 {
            continue;
        }
        for d in 2..=n / m {
            acc[d * m] += hl[d - 1] * fm;
        }
    }
    if let Some(i) = f.iter().position(|v| !v.is_finite()) {
        return Err(Error::Range(format!("coefficient f({}) overflows", i + 1)));
    }
    Ok(f)
}

/// Coefficients of `log F`, inverting the recurrence used by [`dirichlet_exp`].
pub fn dirichlet_log(f: &CoefficientSeries) -> Result<LogCoefficients> {
    dirichlet_log_signed(f.as_slice(), f.label())
}

/// [`dirichlet_log`] on a raw coefficient slice (signs unconstrained beyond `f(1) > 0`).
pub fn dirichlet_log_signed(f: &[f64], label: &str) -> Result<LogCoefficients> {
    let n = f.len();
    let f1 = f[0];
    if !(f1 > 0.0) {
        return Err(Error::Domain(format!("f(1) = {f1} must be positive to take a logarithm")));
    }
    let mut h = vec![0.0; n];
    h[0] = f1.ln();
    let mut acc = vec![0.0; n + 1];
    for m in 2..=n {
        let l = (m as f64).ln();
        // acc[m] = sum over 1 < d < m, d | m of h(d) log d f(m/d)
        h[m - 1] = (f[m - 1] * l - acc[m]) / (f1 * l);
        let hl = h[m - 1] * l;
        if hl == 0.0 {
            continue;
        }
        for k in 2..=n / m {
            acc[m * k] += hl * f[k - 1];
        }
    }
    LogCoefficients::new(h, format!("log({label})"))
}
