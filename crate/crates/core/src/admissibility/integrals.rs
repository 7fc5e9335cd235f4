//! Off-axis integrals of `|F(sigma+it)|/F(sigma)` and their tail bounds, in log scale.

use crate::cmath::log_sum_exp;
use crate::error::Result;
use crate::quadrature::integrate;
use crate::series::{ClosedForm, Majorant, Series};
use num_complex::Complex64 as C64;
use std::cell::Cell;
use std::f64::consts::{LN_10, LN_2};

/// Natural log of a nonnegative quantity, plus whether its quadrature converged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub ln: f64,
    pub converged: bool,
}

impl LogValue {
    pub fn log10(&self) -> f64 {
        self.ln / LN_10
    }
}

const REL_TOL: f64 = 1e-7;
const MAX_PIECES: usize = 6000;
/// Largest cut height for the numeric part of infinite integrals.
pub const T_CUT_MAX: f64 = 256.0;
const T_CUT_START: f64 = 16.0;
/// Piece budget for oscillatory integrals before falling back to the absolute bound.
const OSC_PIECES: usize = 1500;
/// Tolerance of oscillatory integrals, relative to the absolute integral.
const OSC_TOL: f64 = 1e-4;
/// Above this `|a|/sqrt(b)` the signed integral is not attempted.
const OSC_WILD: f64 = 200.0;

/// `int_{t0}^{t1} dt/(sigma^2 + t^2)`.
fn weight_mass(sigma: f64, t0: f64, t1: f64) -> f64 {
    ((t1 / sigma).atan() - (t0 / sigma).atan()) / sigma
}

/// `int_T^inf dt/(sigma^2 + t^2)`, accurate for large `T`.
fn weight_tail(sigma: f64, t: f64) -> f64 {
    (sigma / t).atan() / sigma
}

/// Decay length of `exp(Re Delta H)` just past `delta`, about `1/max(sqrt(b), b delta)`.
fn edge_scale(b: f64, delta: f64) -> Option<f64> {
    (b > 0.0).then(|| 1.0 / b.sqrt().max(b * delta))
}

fn weight(sigma: f64, t: f64) -> f64 {
    1.0 / (sigma * sigma + t * t)
}

/// Breakpoints on `[lo, hi]`: geometric from `lo`, windows of width `~1/sqrt(b)` around peaks,
/// optional equal steps, and a boundary layer `lo + edge 4^j` resolving the decay just past `lo`.
fn breakpoints(lo: f64, hi: f64, peaks: &[f64], width: f64, step: Option<f64>, edge: Option<f64>) -> Vec<f64> {
    let mut v = vec![lo, hi];
    if let Some(e) = edge.filter(|e| *e > 0.0) {
        let mut d = e;
        while lo + d < hi {
            v.push(lo + d);
            d *= 4.0;
        }
    }
    let mut x = lo;
    while x < hi {
        v.push(x);
        x *= 2.0;
    }
    for &p in peaks {
        for k in [-16.0, -4.0, -1.0, 0.0, 1.0, 4.0, 16.0] {
            v.push(p + k * width);
        }
    }
    if let Some(h) = step {
        let mut x = lo;
        while x < hi {
            v.push(x);
            x += h;
        }
    }
    v.retain(|x| x.is_finite() && *x >= lo && *x <= hi);
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

struct Scaled {
    /// The integral is `value * e^scale`.
    scale: f64,
    value: C64,
    error: f64,
    converged: bool,
}

impl Scaled {
    fn ln_abs(&self) -> f64 {
        self.scale + self.value.norm().ln()
    }
}

/// `int kernel(t, exp(Delta H(t) - scale)) dt` over `breaks` with overflow-safe rescaling.
/// `abs_tol_ln` is the log of an absolute tolerance in unscaled units.
fn scaled_integral<F>(
    series: &Series,
    eps: f64,
    breaks: &[f64],
    abs_tol_ln: Option<f64>,
    rel_tol: f64,
    max_pieces: usize,
    kernel: F,
) -> Result<Scaled>
where
    F: Fn(f64, C64) -> C64,
{
    let mut scale = f64::NEG_INFINITY;
    for &t in breaks {
        scale = scale.max(series.increment_at(eps, t)?.re);
    }
    if !scale.is_finite() {
        scale = 0.0;
    }
    let nan = |scale| Scaled { scale, value: C64::new(f64::NAN, 0.0), error: f64::NAN, converged: false };
    for _ in 0..4 {
        let seen = Cell::new(f64::NEG_INFINITY);
        let failed = Cell::new(false);
        let f = |t: f64| match series.increment_at(eps, t) {
            Ok(dh) => {
                seen.set(seen.get().max(dh.re));
                kernel(t, (dh - scale).exp())
            }
            Err(_) => {
                failed.set(true);
                C64::new(0.0, 0.0)
            }
        };
        let abs_tol = abs_tol_ln.map_or(0.0, |l| (l - scale).exp());
        let r = integrate(f, breaks, abs_tol, rel_tol, max_pieces);
        if failed.get() {
            // propagate the evaluation error from the first failing point
            for &t in breaks {
                series.increment_at(eps, t)?;
            }
            return Ok(nan(scale));
        }
        if seen.get() > scale + 30.0 || !r.value.norm().is_finite() {
            scale = seen.get();
            continue;
        }
        return Ok(Scaled { scale, value: r.value, error: r.error, converged: r.converged });
    }
    Ok(nan(scale))
}

/// Log of an upper bound for `int_T^inf |F(sigma+it)|/F(sigma) dt/(sigma^2+t^2)`.
pub fn tail_log(series: &Series, eps: f64, sigma: f64, t: f64) -> Result<f64> {
    match series {
        Series::Coefficients(_) => Ok(weight_tail(sigma, t).ln()),
        Series::ClosedForm(c) => form_tail_log(c.form.as_ref(), eps, sigma, t),
    }
}

fn form_tail_log(form: &dyn ClosedForm, eps: f64, sigma: f64, t: f64) -> Result<f64> {
    let crude = weight_tail(sigma, t).ln();
    Ok(match form.majorant() {
        Majorant::Crude => crude,
        Majorant::Envelope(env) => {
            let h0 = form.jet(eps, 0.0)[0].re;
            let mut parts = Vec::with_capacity(256);
            // segments [e^l, e^l1]: doubling first, then geometric in ln t so that
            // env can reach h0 even when h0 is astronomically large
            let mut l = t.ln();
            for i in 0..400 {
                let l1 = if i < 60 { l + LN_2 } else { l + (0.25 * l).max(LN_2) };
                let log_ratio = env(l1) - h0;
                if log_ratio >= 0.0 {
                    break;
                }
                let mass = if l1 < 700.0 { weight_mass(sigma, l.exp(), l1.exp()).ln() } else { -l };
                parts.push(log_ratio + mass);
                l = l1;
            }
            parts.push(if l < 700.0 { weight_tail(sigma, l.exp()).ln() } else { -l });
            log_sum_exp(&parts).min(crude)
        }
        Majorant::Periodic(p) => {
            let ip = period_mass_log(form, eps, p)?;
            let w = weight(sigma, t) + weight_tail(sigma, t) / p;
            (ip + w.ln()).min(crude)
        }
        Majorant::Factors(fs) => {
            let mut best = crude;
            for f in fs {
                best = best.min(form_tail_log(f.as_ref(), eps, sigma, t)?);
            }
            best
        }
    })
}

/// Log of `int_0^P |F(sigma+it)|/F(sigma) dt` for a form with periodic modulus.
fn period_mass_log(form: &dyn ClosedForm, eps: f64, p: f64) -> Result<f64> {
    let b = form.jet(eps, 0.0)[2].re;
    let width = if b > 0.0 { 1.0 / b.sqrt() } else { p / 8.0 };
    let mut br = vec![0.0, 0.5 * p, p];
    for k in [1.0, 4.0, 16.0] {
        br.push(k * width);
        br.push(p - k * width);
    }
    br.retain(|x| *x >= 0.0 && *x <= p);
    br.sort_by(f64::total_cmp);
    br.dedup();
    let r = integrate(|t| C64::new(form.increment(eps, t).re.exp(), 0.0), &br, 0.0, REL_TOL, MAX_PIECES);
    Ok(r.value.re.ln())
}

/// `W(u) = sum_{m >= 1} 1/(sigma^2 + (mP+u)^2)`, with the sum past `M` bounded by an integral.
fn periodic_weight(sigma: f64, p: f64, u: f64) -> f64 {
    const M: usize = 256;
    let mut acc = 0.0;
    for m in 1..=M {
        acc += weight(sigma, m as f64 * p + u);
    }
    acc + weight_tail(sigma, M as f64 * p + u) / p
}

/// Upper bound for `int_{|t| >= delta} |F(sigma+it)|/F(sigma) dt/(sigma^2+t^2)` (both signs of `t`).
pub fn off_axis_mass(series: &Series, eps: f64, delta: f64) -> Result<LogValue> {
    let sigma = series.alpha() + eps;
    let b = series.real_jet_at(eps)?[2];
    let width = if b > 0.0 { 1.0 / b.sqrt() } else { 1.0 };
    let edge = edge_scale(b, delta);
    let periodic = match (series, series.majorant()) {
        (Series::ClosedForm(_), Majorant::Periodic(p)) if delta < 0.5 * p => Some(p),
        _ => None,
    };
    if let Some(p) = periodic {
        let half = 0.5 * p;
        let br = breakpoints(delta, half, &[], width, None, edge);
        let i1 = scaled_integral(series, eps, &br, None, REL_TOL, MAX_PIECES, |t, r| C64::new(r.norm() * weight(sigma, t), 0.0))?;
        let br0 = breakpoints(width.min(half) * 1e-3, half, &[], width, None, None);
        let mut br0 = br0;
        br0.insert(0, 0.0);
        let i2 = scaled_integral(series, eps, &br0, None, REL_TOL, MAX_PIECES, |u, r| {
            C64::new(r.norm() * (periodic_weight(sigma, p, u) + periodic_weight(sigma, p, -u)), 0.0)
        })?;
        let ln = log_sum_exp(&[i1.ln_abs(), i2.ln_abs()]) + 2f64.ln();
        return Ok(LogValue { ln, converged: i1.converged && i2.converged });
    }
    let mut t_cut = T_CUT_START.max(4.0 * delta);
    let peaks = series.peaks(T_CUT_MAX);
    let mut parts: Vec<f64> = Vec::new();
    let mut converged = true;
    let mut lo = delta;
    loop {
        let pk: Vec<f64> = peaks.iter().copied().filter(|p| *p > lo && *p < t_cut).collect();
        let br = breakpoints(lo, t_cut, &pk, width, None, edge.filter(|_| lo == delta));
        let i = scaled_integral(series, eps, &br, None, REL_TOL, MAX_PIECES, |t, r| C64::new(r.norm() * weight(sigma, t), 0.0))?;
        converged &= i.converged;
        parts.push(i.ln_abs());
        let numeric = log_sum_exp(&parts);
        let tail = tail_log(series, eps, sigma, t_cut)?;
        if tail < numeric + (1e-3f64).ln() || t_cut >= T_CUT_MAX {
            let ln = log_sum_exp(&[numeric, tail]) + 2f64.ln();
            return Ok(LogValue { ln, converged });
        }
        lo = t_cut;
        t_cut *= 2.0;
    }
}

/// Upper bound for `max_x |int_{|t| >= delta} F(sigma+it)/F(sigma) x^{it} dt/((sigma+it)(sigma+1+it))|`.
pub fn off_axis_perron_mass(series: &Series, eps: f64, delta: f64, xs: &[f64]) -> Result<LogValue> {
    let sigma = series.alpha() + eps;
    let jet = series.real_jet_at(eps)?;
    let (a, b) = (jet[1], jet[2]);
    let width = if b > 0.0 { 1.0 / b.sqrt() } else { 1.0 };
    let edge = edge_scale(b, delta);
    // phase turns per unit of the Gaussian width near the cut
    let wild = b > 0.0 && a.abs() * width > OSC_WILD;
    // the absolute integral fixes the cut height and bounds the oscillatory one
    let mut t_cut = T_CUT_START.max(4.0 * delta);
    let abs_peaks = series.peaks(T_CUT_MAX);
    let mut parts: Vec<f64> = Vec::new();
    let mut converged = true;
    let mut lo = delta;
    let abs_ln = loop {
        let pk: Vec<f64> = abs_peaks.iter().copied().filter(|p| *p > lo && *p < t_cut).collect();
        let br = breakpoints(lo, t_cut, &pk, width, None, edge.filter(|_| lo == delta));
        let i = scaled_integral(series, eps, &br, None, REL_TOL, MAX_PIECES, |t, r| C64::new(r.norm() * weight(sigma, t), 0.0))?;
        converged &= i.converged;
        parts.push(i.ln_abs());
        let numeric = log_sum_exp(&parts);
        let tail = tail_log(series, eps, sigma, t_cut)?;
        if tail < numeric + (1e-3f64).ln() || t_cut >= T_CUT_MAX {
            break numeric;
        }
        lo = t_cut;
        t_cut *= 2.0;
    };
    let tail = tail_log(series, eps, sigma, t_cut)?;
    let mut abs_bound = log_sum_exp(&[abs_ln, tail]) + 2f64.ln();
    if matches!(series.majorant(), Majorant::Periodic(_)) {
        // the period reduction handles the recurring peaks the direct sweep may not resolve
        let m = off_axis_mass(series, eps, delta)?;
        abs_bound = m.ln;
        converged = m.converged;
    }
    let mut best = f64::NEG_INFINITY;
    let pk: Vec<f64> = abs_peaks.iter().copied().filter(|p| *p > delta && *p < t_cut).collect();
    if wild {
        return Ok(LogValue { ln: abs_bound, converged });
    }
    for &x in xs {
        let lx = x.ln();
        let step = if lx > 0.0 { Some(std::f64::consts::TAU / lx) } else { None };
        let br = breakpoints(delta, t_cut, &pk, width, step, edge);
        let i = scaled_integral(series, eps, &br, Some(abs_ln + OSC_TOL.ln()), OSC_TOL, OSC_PIECES, |t, r| {
            let g = (C64::new(sigma, t) * C64::new(sigma + 1.0, t)).inv();
            r * C64::new(0.0, t * lx).exp() * g
        })?;
        if !i.converged {
            // too oscillatory to resolve; the absolute integral still bounds it
            best = best.max(abs_bound);
            continue;
        }
        // both signs of t: the integrand is conjugate-symmetric, so the sum is twice the real part
        let numeric = i.scale + (2.0 * (i.value.re.abs() + i.error)).ln();
        let total = log_sum_exp(&[numeric, tail + 2f64.ln()]).min(abs_bound);
        best = best.max(total);
    }
    Ok(LogValue { ln: best, converged })
}

/// Largest `|F(sigma+it)|/F(sigma)` for `t` in `[t_lo, t_hi]`, sampled up to `scan_max` and
/// bounded through the majorant beyond.
pub fn sup_ratio_log(series: &Series, eps: f64, t_lo: f64, t_hi: f64, scan_max: f64) -> Result<f64> {
    if !(t_hi >= t_lo) {
        return Ok(f64::NEG_INFINITY);
    }
    let top = t_hi.min(scan_max);
    let mut best = f64::NEG_INFINITY;
    for t in scan_points(t_lo, top, series.peaks(top)) {
        best = best.max(series.increment_at(eps, t)?.re);
    }
    if t_hi > scan_max {
        best = best.max(beyond_log(series, eps, t_hi));
    }
    Ok(best.min(0.0))
}

fn beyond_log(series: &Series, eps: f64, t_hi: f64) -> f64 {
    fn form_beyond(form: &dyn ClosedForm, eps: f64, t_hi: f64) -> f64 {
        match form.majorant() {
            Majorant::Envelope(env) => (env(t_hi.ln()) - form.jet(eps, 0.0)[0].re).min(0.0),
            Majorant::Factors(fs) => fs.iter().map(|f| form_beyond(f.as_ref(), eps, t_hi)).fold(0.0, f64::min),
            Majorant::Crude | Majorant::Periodic(_) => 0.0,
        }
    }
    match series {
        Series::Coefficients(_) => 0.0,
        Series::ClosedForm(c) => form_beyond(c.form.as_ref(), eps, t_hi),
    }
}

/// Sample heights: 16 per octave from `lo` to `hi`, plus peaks and their neighbours.
pub fn scan_points(lo: f64, hi: f64, peaks: Vec<f64>) -> Vec<f64> {
    let mut v = Vec::new();
    if lo > 0.0 {
        let mut t = lo;
        let f = 2f64.powf(1.0 / 16.0);
        while t < hi {
            v.push(t);
            t *= f;
        }
    }
    v.push(hi);
    v.extend(peaks.into_iter().filter(|p| *p >= lo && *p <= hi));
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}
