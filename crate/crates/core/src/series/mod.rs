//! Dirichlet series in two representations: truncated coefficients and closed forms.

pub mod coefficients;

pub use coefficients::{
    dirichlet_exp, dirichlet_exp_signed, dirichlet_log, dirichlet_log_signed, dirichlet_mul, CoefficientSeries,
    Evaluation, LogCoefficients, MARGIN,
};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use num_complex::Complex64 as C64;
use std::fmt;
use std::sync::Arc;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Analytic evaluator for `H = log F`, parameterised by the offset `eps = sigma - alpha`
/// so that points extremely close to the abscissa keep full relative precision.
pub trait ClosedForm: Send + Sync + fmt::Debug {
    /// `[H, H', H'', H''']` at `alpha + eps + i t`.
    fn jet(&self, eps: f64, t: f64) -> [C64; 4];

    /// `H(alpha+eps+it) - H(alpha+eps)`.
    fn increment(&self, eps: f64, t: f64) -> C64 {
        self.jet(eps, t)[0] - self.jet(eps, 0.0)[0]
    }

    /// Taylor remainder `H(s) - H(sigma) - i a t + b t^2/2` at `s = sigma + it`.
    fn remainder(&self, eps: f64, t: f64) -> C64 {
        let j0 = self.jet(eps, 0.0);
        self.increment(eps, t) - I * j0[1] * t + j0[2] * (0.5 * t * t)
    }

    /// What is known about `|F(sigma+it)|` away from the real axis.
    fn majorant(&self) -> Majorant {
        Majorant::Crude
    }

    /// Heights `0 < t <= t_max` where `|F(sigma+it)|/F(sigma)` has local maxima close to 1.
    fn peaks(&self, _t_max: f64) -> Vec<f64> {
        Vec::new()
    }
}

/// Bounds on `|F(sigma+it)|` used to control infinite integrals in `t`.
#[derive(Clone)]
pub enum Majorant {
    /// Only `|F(sigma+it)| <= F(sigma)`.
    Crude,
    /// `|F(sigma+it)|` is periodic in `t` with the given period.
    Periodic(f64),
    /// `Re H(sigma+it) <= env(ln |t|)` for `|t| >= 1`, with `env` nondecreasing.
    Envelope(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// `|F| / F(sigma)` is bounded by each factor's own ratio.
    Factors(Vec<Arc<dyn ClosedForm>>),
}

impl fmt::Debug for Majorant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Majorant::Crude => write!(f, "Crude"),
            Majorant::Periodic(p) => write!(f, "Periodic({p})"),
            Majorant::Envelope(_) => write!(f, "Envelope"),
            Majorant::Factors(v) => write!(f, "Factors({})", v.len()),
        }
    }
}

/// Taylor remainder from its integral form `-(i/2) int_0^t c(sigma+iv)(t-v)^2 dv`.
pub fn remainder_integral_form(form: &dyn ClosedForm, eps: f64, t: f64, panel: f64) -> C64 {
    if t == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let (x, w) = gauss_legendre(20);
    let panels = ((t.abs() / panel.max(1e-300)).ceil() as usize).clamp(1, 4096);
    let h = t / panels as f64;
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..panels {
        let a = p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            let v = a + 0.5 * h * (xi + 1.0);
            acc += form.jet(eps, v)[3] * ((t - v) * (t - v) * wi * 0.5 * h);
        }
    }
    -I * 0.5 * acc
}

/// A closed-form series with an optional coefficient generator output attached.
#[derive(Debug, Clone)]
pub struct ClosedFormSeries {
    pub label: String,
    pub alpha: f64,
    pub form: Arc<dyn ClosedForm>,
    pub coefficients: Option<CoefficientSeries>,
}

impl ClosedFormSeries {
    pub fn new(label: impl Into<String>, alpha: f64, form: Arc<dyn ClosedForm>) -> Self {
        ClosedFormSeries { label: label.into(), alpha, form, coefficients: None }
    }

    pub fn with_coefficients(mut self, c: CoefficientSeries) -> Self {
        self.coefficients = Some(c);
        self
    }
}

/// Constant `H`; `F` is the unit series scaled by `e^H`.
#[derive(Debug, Clone)]
pub struct ConstantForm(pub f64);

impl ClosedForm for ConstantForm {
    fn jet(&self, _eps: f64, _t: f64) -> [C64; 4] {
        [C64::new(self.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]
    }

    fn increment(&self, _eps: f64, _t: f64) -> C64 {
        C64::new(0.0, 0.0)
    }
}

/// `H = H_1 + H_2 + ...`.
#[derive(Debug, Clone)]
pub struct ProductForm(pub Vec<Arc<dyn ClosedForm>>);

impl ClosedForm for ProductForm {
    fn jet(&self, eps: f64, t: f64) -> [C64; 4] {
        let mut out = [C64::new(0.0, 0.0); 4];
        for f in &self.0 {
            for (o, v) in out.iter_mut().zip(f.jet(eps, t)) {
                *o += v;
            }
        }
        out
    }

    fn increment(&self, eps: f64, t: f64) -> C64 {
        self.0.iter().map(|f| f.increment(eps, t)).sum()
    }

    fn remainder(&self, eps: f64, t: f64) -> C64 {
        self.0.iter().map(|f| f.remainder(eps, t)).sum()
    }

    fn majorant(&self) -> Majorant {
        Majorant::Factors(self.0.clone())
    }

    fn peaks(&self, t_max: f64) -> Vec<f64> {
        let mut v: Vec<f64> = self.0.iter().flat_map(|f| f.peaks(t_max)).collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        v
    }
}

/// A Dirichlet series `F = e^H`, coefficient-backed or closed-form.
#[derive(Debug, Clone)]
pub enum Series {
    Coefficients(CoefficientSeries),
    ClosedForm(ClosedFormSeries),
}

impl From<CoefficientSeries> for Series {
    fn from(c: CoefficientSeries) -> Self {
        Series::Coefficients(c)
    }
}

impl From<ClosedFormSeries> for Series {
    fn from(c: ClosedFormSeries) -> Self {
        Series::ClosedForm(c)
    }
}

impl Series {
    pub fn alpha(&self) -> f64 {
        match self {
            Series::Coefficients(c) => c.alpha(),
            Series::ClosedForm(c) => c.alpha,
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Series::Coefficients(c) => c.label(),
            Series::ClosedForm(c) => &c.label,
        }
    }

    /// Exact coefficients, when the series carries them.
    pub fn coefficients(&self) -> Option<&CoefficientSeries> {
        match self {
            Series::Coefficients(c) => Some(c),
            Series::ClosedForm(c) => c.coefficients.as_ref(),
        }
    }

    pub fn closed_form(&self) -> Option<&Arc<dyn ClosedForm>> {
        match self {
            Series::Coefficients(_) => None,
            Series::ClosedForm(c) => Some(&c.form),
        }
    }

    /// Smallest admissible offset `sigma - alpha` for evaluation.
    pub fn min_offset(&self) -> f64 {
        match self {
            Series::Coefficients(_) => MARGIN * (1.0 + 1e-12),
            Series::ClosedForm(_) => f64::MIN_POSITIVE,
        }
    }

    fn check_offset(&self, eps: f64) -> Result<()> {
        let ok = match self {
            Series::Coefficients(_) => eps > MARGIN,
            Series::ClosedForm(_) => eps > 0.0,
        };
        if !ok || !eps.is_finite() {
            return Err(Error::Domain(format!(
                "sigma - alpha = {eps} is outside the evaluation domain of '{}'",
                self.label()
            )));
        }
        Ok(())
    }

    /// `[H, a, b, c]` at `alpha + eps + i t` (complex derivatives of `H`).
    pub fn jet_at(&self, eps: f64, t: f64) -> Result<[C64; 4]> {
        self.check_offset(eps)?;
        let j = match self {
            Series::Coefficients(c) => c.log_jet(C64::new(c.alpha() + eps, t))?.derivs(),
            Series::ClosedForm(c) => c.form.jet(eps, t),
        };
        if j.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Range(format!("H or a derivative overflows at sigma - alpha = {eps}, t = {t}")));
        }
        Ok(j)
    }

    /// Real `(H, a, b, c)` at `sigma = alpha + eps`.
    pub fn real_jet_at(&self, eps: f64) -> Result<[f64; 4]> {
        Ok(self.jet_at(eps, 0.0)?.map(|v| v.re))
    }

    /// `(a, b, c)` at real `sigma`.
    pub fn eval_derivatives(&self, sigma: f64) -> Result<(f64, f64, f64)> {
        let j = self.real_jet_at(sigma - self.alpha())?;
        Ok((j[1], j[2], j[3]))
    }

    /// `F(s)`. Coefficient-backed series also report a tail bound where one exists.
    pub fn eval_f(&self, s: C64) -> Result<Evaluation> {
        match self {
            Series::Coefficients(c) => c.eval(s),
            Series::ClosedForm(c) => {
                let eps = s.re - c.alpha;
                self.check_offset(eps)?;
                let h = c.form.jet(eps, s.im)[0];
                Ok(Evaluation { value: h.exp(), tail_bound: None })
            }
        }
    }

    /// `H(alpha+eps+it) - H(alpha+eps)`.
    pub fn increment_at(&self, eps: f64, t: f64) -> Result<C64> {
        self.check_offset(eps)?;
        Ok(match self {
            Series::Coefficients(c) => {
                let s = c.alpha() + eps;
                c.log_jet(C64::new(s, t))?.value() - c.log_jet(C64::new(s, 0.0))?.value()
            }
            Series::ClosedForm(c) => c.form.increment(eps, t),
        })
    }

    /// Taylor remainder `R(alpha+eps+it)`.
    pub fn remainder_at(&self, eps: f64, t: f64) -> Result<C64> {
        self.check_offset(eps)?;
        Ok(match self {
            Series::Coefficients(_) => {
                let j0 = self.jet_at(eps, 0.0)?;
                self.increment_at(eps, t)? - I * j0[1] * t + j0[2] * (0.5 * t * t)
            }
            Series::ClosedForm(c) => c.form.remainder(eps, t),
        })
    }

    /// `R(sigma + it)` at real `sigma`.
    pub fn remainder(&self, sigma: f64, t: f64) -> Result<C64> {
        self.remainder_at(sigma - self.alpha(), t)
    }

    pub fn majorant(&self) -> Majorant {
        match self {
            Series::Coefficients(_) => Majorant::Crude,
            Series::ClosedForm(c) => c.form.majorant(),
        }
    }

    pub fn peaks(&self, t_max: f64) -> Vec<f64> {
        match self {
            Series::Coefficients(_) => Vec::new(),
            Series::ClosedForm(c) => c.form.peaks(t_max),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_has_zero_derivatives() {
        let s: Series = ClosedFormSeries::new("const", 0.0, Arc::new(ConstantForm(0.0))).into();
        assert_eq!(s.eval_derivatives(0.7).unwrap(), (0.0, 0.0, 0.0));
        assert_eq!(s.remainder(0.7, 0.3).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn coefficient_jet_matches_direct_sums() {
        let f = dirichlet_mul(&CoefficientSeries::ones(2000), &CoefficientSeries::ones(2000));
        let s: Series = f.clone().into();
        let sigma = 5.0;
        let (a, _, _) = s.eval_derivatives(sigma).unwrap();
        let fv = f.eval(C64::new(sigma, 0.0)).unwrap().value.re;
        let fd = f.eval_derivative_real(sigma).unwrap();
        assert!((a - fd / fv).abs() < 1e-8 * a.abs());
    }

    #[test]
    fn coefficient_domain_enforced() {
        let s: Series = CoefficientSeries::ones(100).into();
        assert!(matches!(s.eval_derivatives(1.01), Err(Error::Domain(_))));
        assert!(s.eval_derivatives(1.5).is_ok());
    }
}
