//! Contour integrals for `F-hat(x)` along `Re s = c`, the central/tail split, and the
//! truncated Gaussian integral.

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::series::{Series, MARGIN};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

/// Points per block between exact reseeds of the phase recurrence.
const BLOCK: usize = 512;
/// Step halvings allowed per segment.
const MAX_HALVINGS: usize = 10;
/// Largest truncation height the automatic extension may reach.
pub const T_CAP: f64 = 1e7;
/// Absolute accuracy floor, relative to `x^{c+1} F(c) / pi`, used when `F-hat(x)` is tiny.
const FLOOR: f64 = 1e-2;

/// Line `Re s = c`, truncation height `T`, minimum panels per segment and tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourSpec {
    pub c: f64,
    pub t_max: f64,
    pub panels: usize,
    pub tol: f64,
}

impl ContourSpec {
    pub fn new(c: f64) -> Self {
        ContourSpec { c, t_max: 64.0, panels: 16, tol: 1e-8 }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_t_max(mut self, t: f64) -> Self {
        self.t_max = t;
        self
    }

    fn validate(&self, series: &Series) -> Result<()> {
        if !(self.t_max > 0.0) || self.panels < 16 || !(self.tol > 0.0) {
            return Err(Error::Invalid(format!(
                "contour needs T > 0, panels >= 16 and tol > 0 (got T = {}, panels = {}, tol = {})",
                self.t_max, self.panels, self.tol
            )));
        }
        let margin = if matches!(series, Series::Coefficients(_)) { MARGIN } else { 0.0 };
        let alpha = series.alpha();
        if !(self.c > alpha + margin) || !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::Domain(format!("contour abscissa c = {} must exceed {}", self.c, alpha + margin)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureResult {
    /// The full-line integral; real because the integrand is conjugate-symmetric in `t`.
    pub value: C64,
    /// Bound on the contribution from `|t| > t_used`.
    pub tail_bound: f64,
    /// `(J1, J2)` when a cut was requested.
    pub split: Option<(C64, C64)>,
    pub t_used: f64,
    /// Simpson panels used over all segments.
    pub panels: usize,
    /// False when the tail bound could not be pushed below `tol * |value|`.
    pub converged: bool,
}

/// `s(s+1)` at `s = c + it`.
fn kernel_inv(c: f64, t: f64) -> C64 {
    (C64::new(c, t) * C64::new(c + 1.0, t)).inv()
}

/// `F(c+it) x^{it} / ((c+it)(c+1+it))` divided by `F(c)`.
enum Integrand<'a> {
    /// Dirichlet polynomial: weights `f(n) n^{-c} / F(c)` and frequencies `log(x/n)`.
    Poly { w: Vec<f64>, l: Vec<f64>, c: f64, ln_f: f64 },
    Closed { series: &'a Series, eps: f64, c: f64, lx: f64, ln_f: f64 },
}

impl Integrand<'_> {
    fn new<'a>(series: &'a Series, x: f64, c: f64) -> Result<Integrand<'a>> {
        let lx = x.ln();
        if let Some(co) = series.coefficients() {
            let mut raw = Vec::new();
            let mut l = Vec::new();
            for (i, &f) in co.as_slice().iter().enumerate() {
                if f != 0.0 {
                    let ln_n = ((i + 1) as f64).ln();
                    raw.push(f.ln() - c * ln_n);
                    l.push(lx - ln_n);
                }
            }
            let ln_f = crate::cmath::log_sum_exp(&raw);
            let w = raw.iter().map(|r| (r - ln_f).exp()).collect();
            return Ok(Integrand::Poly { w, l, c, ln_f });
        }
        let eps = c - series.alpha();
        let ln_f = series.real_jet_at(eps)?[0];
        Ok(Integrand::Closed { series, eps, c, lx, ln_f })
    }

    fn ln_f(&self) -> f64 {
        match self {
            Integrand::Poly { ln_f, .. } | Integrand::Closed { ln_f, .. } => *ln_f,
        }
    }

    /// Largest frequency of the integrand in `t`.
    fn max_frequency(&self) -> f64 {
        match self {
            Integrand::Poly { l, .. } => l.iter().fold(0.0, |m, v| m.max(v.abs())),
            Integrand::Closed { lx, .. } => lx.abs(),
        }
    }

    /// `sum_{k < m} psi(t0 + k h)`.
    fn grid_sum(&self, t0: f64, h: f64, m: usize) -> Result<C64> {
        let blocks: Vec<usize> = (0..m.div_ceil(BLOCK)).collect();
        let parts: Vec<Result<C64>> = blocks
            .par_iter()
            .map(|&b| {
                let k0 = b * BLOCK;
                let len = BLOCK.min(m - k0);
                self.block(t0 + k0 as f64 * h, h, len)
            })
            .collect();
        let mut acc = C64::new(0.0, 0.0);
        for p in parts {
            acc += p?;
        }
        Ok(acc)
    }

    fn block(&self, t0: f64, h: f64, len: usize) -> Result<C64> {
        match self {
            Integrand::Poly { w, l, c, .. } => {
                let mut acc = vec![C64::new(0.0, 0.0); len];
                for (&wn, &ln) in w.iter().zip(l) {
                    let mut z = C64::from_polar(wn, t0 * ln);
                    let step = C64::from_polar(1.0, h * ln);
                    for a in acc.iter_mut() {
                        *a += z;
                        z *= step;
                    }
                }
                Ok(acc.iter().enumerate().map(|(k, a)| a * kernel_inv(*c, t0 + k as f64 * h)).sum())
            }
            Integrand::Closed { series, eps, c, lx, .. } => {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..len {
                    let t = t0 + k as f64 * h;
                    let r = series.increment_at(*eps, t)?;
                    acc += (r + C64::new(0.0, t * lx)).exp() * kernel_inv(*c, t);
                }
                Ok(acc)
            }
        }
    }

    fn at(&self, t: f64) -> Result<C64> {
        self.block(t, 0.0, 1)
    }

    /// Bound on `|int_T^inf psi|` plus the part of the tail known in closed form: the
    /// zero-frequency term exactly, and for the others the two boundary terms of a double
    /// integration by parts whenever their remainder bound beats the single one.
    fn tail(&self, t: f64) -> (f64, f64) {
        let crude = |c: f64| (FRAC_PI_2 - (t / c).atan()) / c;
        match self {
            Integrand::Poly { w, l, c, .. } => {
                let a = 2.0 * c + 1.0;
                let (t2, t3) = (t * t, t * t * t);
                // kernel g = 1/p, p = (c+it)(c+1+it), |p| >= t^2, |p'| <= a + 2t
                let g = kernel_inv(*c, t);
                let dg = -C64::new(-2.0 * t, a) * g * g;
                let once = 2.0 / t2 + a / (3.0 * t3);
                let twice = 10.0 / (3.0 * t3) + 2.0 * a / (t3 * t) + 0.4 * a * a / (t3 * t2);
                let mut bound = 0.0;
                let mut exact = 0.0;
                let cr = crude(*c);
                for (&wn, &ln) in w.iter().zip(l) {
                    if ln == 0.0 {
                        // Re int_T^inf dt / ((c+it)(c+1+it))
                        exact += wn * ((t / (c + 1.0)).atan() - (t / c).atan());
                        continue;
                    }
                    let b1 = (once / ln.abs()).min(cr);
                    let b2 = twice / (ln * ln);
                    if b2 < b1 {
                        // int_T^inf e^{ilu} g = e^{ilT} (i g(T)/l - g'(T)/l^2) + remainder
                        let phase = C64::from_polar(wn, ln * t);
                        exact += (phase * (C64::new(0.0, 1.0 / ln) * g - dg / (ln * ln))).re;
                        bound += wn * b2;
                    } else {
                        bound += wn * b1;
                    }
                }
                (bound, exact)
            }
            Integrand::Closed { c, .. } => (crude(*c), 0.0),
        }
    }
}

/// Composite Simpson on `[a, b]` with step halving until successive values differ by
/// less than `tol/2 * max(|S|, reference)`.
fn simpson_segment(ig: &Integrand, a: f64, b: f64, h_cap: f64, min_panels: usize, tol: f64, reference: f64) -> Result<(C64, usize)> {
    let mut n = (((b - a) / h_cap).ceil() as usize).max(min_panels).div_ceil(2);
    let mut h = (b - a) / (2 * n) as f64;
    let ends = ig.at(a)? + ig.at(b)?;
    let mut odd = ig.grid_sum(a + h, 2.0 * h, n)?;
    let mut even = ig.grid_sum(a + 2.0 * h, 2.0 * h, n - 1)?;
    let mut s = (ends + odd * 4.0 + even * 2.0) * (h / 3.0);
    for _ in 0..MAX_HALVINGS {
        even += odd;
        h *= 0.5;
        n *= 2;
        odd = ig.grid_sum(a + h, 2.0 * h, n)?;
        let next = (ends + odd * 4.0 + even * 2.0) * (h / 3.0);
        let diff = (next - s).norm();
        s = next;
        if diff < 0.5 * tol * s.norm().max(reference) {
            return Ok((s, 2 * n));
        }
    }
    Err(Error::Convergence(format!(
        "Simpson on [{a}, {b}] not converged after {MAX_HALVINGS} halvings ({} panels)",
        2 * n
    )))
}

struct Line {
    inner: C64,
    outer: C64,
    exact_tail: f64,
    tail: f64,
    t_used: f64,
    panels: usize,
    converged: bool,
    ln_f: f64,
}

/// `int_0^T psi` split at `cut`, with `T` extended until the tail bound meets the tolerance.
fn integrate_line(series: &Series, x: f64, spec: &ContourSpec, cut: Option<f64>) -> Result<Line> {
    let ig = Integrand::new(series, x, spec.c)?;
    let h_cap = (PI / (4.0 * ig.max_frequency())).min(0.25);
    let extend = matches!(ig, Integrand::Poly { .. });
    let mut line = Line {
        inner: C64::new(0.0, 0.0),
        outer: C64::new(0.0, 0.0),
        exact_tail: 0.0,
        tail: 0.0,
        t_used: 0.0,
        panels: 0,
        converged: false,
        ln_f: ig.ln_f(),
    };
    let add = |line: &mut Line, a: f64, b: f64| -> Result<()> {
        let mut pts = vec![a, b];
        if let Some(c) = cut.filter(|c| *c > a && *c < b) {
            pts.insert(1, c);
        }
        for w in pts.windows(2) {
            let reference = (line.inner + line.outer).re.abs().max(FLOOR);
            let (v, p) = simpson_segment(&ig, w[0], w[1], h_cap, spec.panels, spec.tol, reference)?;
            line.panels += p;
            if cut.is_some_and(|c| w[1] <= c) {
                line.inner += v;
            } else {
                line.outer += v;
            }
        }
        line.t_used = b;
        Ok(())
    };
    add(&mut line, 0.0, spec.t_max)?;
    loop {
        let (tail, exact) = ig.tail(line.t_used);
        line.tail = tail;
        line.exact_tail = exact;
        let target = spec.tol * ((line.inner + line.outer).re + exact).abs().max(FLOOR);
        if tail <= target {
            line.converged = true;
            break;
        }
        if !extend || line.t_used >= T_CAP {
            break;
        }
        // smallest doubling of T that meets half the target, assuming the value holds
        let mut t = line.t_used;
        while t < T_CAP && ig.tail(t).0 > 0.5 * target {
            t *= 2.0;
        }
        let lo = line.t_used;
        add(&mut line, lo, t.min(T_CAP))?;
    }
    Ok(line)
}

/// `F-hat(x) = (1/2 pi i) int_{c-i inf}^{c+i inf} F(s) x^{s+1} / (s(s+1)) ds` by quadrature.
///
/// Coefficient-backed series integrate the Dirichlet polynomial with a per-term tail bound
/// and extend `T` automatically; closed forms use `|F(c+it)| <= F(c)` beyond `T`.
pub fn perron_hat(series: &Series, x: f64, spec: &ContourSpec) -> Result<QuadratureResult> {
    spec.validate(series)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Invalid(format!("x = {x} must be a positive finite real")));
    }
    let line = integrate_line(series, x, spec, None)?;
    let scale = ((spec.c + 1.0) * x.ln() + line.ln_f).exp() / PI;
    let v = (line.inner + line.outer).re + line.exact_tail;
    Ok(QuadratureResult {
        value: C64::new(scale * v, 0.0),
        tail_bound: scale * line.tail,
        split: None,
        t_used: line.t_used,
        panels: line.panels,
        converged: line.converged,
    })
}

/// `J1 = int_{|t| <= delta}` and `J2 = int_{delta <= |t| <= T}` of
/// `F(sigma+it) x^{it} / ((sigma+it)(sigma+1+it))`; `value` is the Perron integral rebuilt
/// from them.
pub fn split_j(series: &Series, x: f64, sigma: f64, delta: f64, spec: &ContourSpec) -> Result<QuadratureResult> {
    if !(delta > 0.0) {
        return Err(Error::Invalid(format!("delta = {delta} must be positive")));
    }
    let spec = ContourSpec { c: sigma, ..*spec };
    spec.validate(series)?;
    let line = integrate_line(series, x, &spec, Some(delta))?;
    let f = line.ln_f.exp();
    // both signs of t: twice the real part
    let j1 = C64::new(2.0 * f * line.inner.re, 0.0);
    let j2 = C64::new(2.0 * f * (line.outer.re + line.exact_tail), 0.0);
    let xs = (sigma + 1.0) * x.ln();
    Ok(QuadratureResult {
        value: (j1 + j2) * (xs.exp() / (2.0 * PI)),
        tail_bound: 2.0 * f * line.tail * xs.exp() / (2.0 * PI),
        split: Some((j1, j2)),
        t_used: line.t_used,
        panels: line.panels,
        converged: line.converged,
    })
}

/// Closed form, bound and quadrature of `int_{-h}^{h} e^{i kappa u - lambda u^2} du`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianCheck {
    /// `sqrt(pi/lambda) exp(-kappa^2 / (4 lambda))`.
    pub closed: C64,
    /// `2 / (h sqrt(lambda))`.
    pub bound: f64,
    pub quadrature: C64,
    /// `|quadrature - closed| / |closed|`.
    pub relative_gap: f64,
}

impl GaussianCheck {
    pub fn within_bound(&self) -> bool {
        self.relative_gap < self.bound
    }
}

pub fn gaussian_integral(h: f64, kappa: f64, lambda: f64) -> Result<GaussianCheck> {
    if !(h > 0.0) || !(lambda > 0.0) || !kappa.is_finite() {
        return Err(Error::Invalid(format!("need h > 0, lambda > 0, finite kappa (got {h}, {lambda}, {kappa})")));
    }
    let closed = C64::new((PI / lambda).sqrt() * (-kappa * kappa / (4.0 * lambda)).exp(), 0.0);
    let bound = 2.0 / (h * lambda.sqrt());
    // even integrand in u for the real part, odd for the imaginary part
    let mut breaks = vec![0.0];
    let width = 1.0 / lambda.sqrt();
    let period = if kappa != 0.0 { 2.0 * PI / kappa.abs() } else { f64::INFINITY };
    let step = width.min(period);
    let n = ((h / step).ceil() as usize).clamp(1, 100_000);
    breaks.extend((1..=n).map(|i| h * i as f64 / n as f64));
    let r = integrate(|u| C64::new((kappa * u).cos() * (-lambda * u * u).exp(), 0.0), &breaks, 0.0, 1e-13, 50_000);
    let quadrature = r.value * 2.0;
    let relative_gap = (quadrature - closed).norm() / closed.norm();
    Ok(GaussianCheck { closed, bound, quadrature, relative_gap })
}
