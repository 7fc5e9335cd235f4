use crate::error::{Error, Result};
use crate::series::Series;
use serde::Serialize;
use std::fmt;
use std::sync::Arc;

/// A function of the offset `eps = sigma - alpha`.
pub type OffsetFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSource {
    User,
    DefaultBcPower,
    Tenenbaum,
}

/// Cut radius `delta(sigma)`, optional height `T(sigma)` and the interval end `beta`.
#[derive(Clone)]
pub struct Witness {
    pub delta: OffsetFn,
    pub t: Option<OffsetFn>,
    /// `beta - alpha`
    pub beta_offset: f64,
    pub source: WitnessSource,
}

impl fmt::Debug for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Witness")
            .field("beta_offset", &self.beta_offset)
            .field("has_t", &self.t.is_some())
            .field("source", &self.source)
            .finish()
    }
}

/// Upper clip for `delta`, keeping it inside `(0, 1)`.
pub const DELTA_CAP: f64 = 1.0 - 1e-9;

impl Witness {
    pub fn beta(&self, alpha: f64) -> f64 {
        alpha + self.beta_offset
    }

    pub fn delta_at(&self, eps: f64) -> f64 {
        (self.delta)(eps)
    }

    pub fn t_at(&self, eps: f64) -> Option<f64> {
        self.t.as_ref().map(|t| t(eps))
    }

    pub fn with_t(mut self, t: OffsetFn) -> Self {
        self.t = Some(t);
        self
    }
}

/// `|b c|^{-1/5}` clipped into `(0, 1)`; NaN where `b c` is zero or not finite.
pub fn bc_power_delta(b: f64, c: f64) -> f64 {
    let lb = b.abs().ln();
    let lc = c.abs().ln();
    let l = lb + lc;
    if !l.is_finite() {
        return f64::NAN;
    }
    (-0.2 * l).exp().min(DELTA_CAP)
}

/// Largest `2^j`, `j` in `0..=-64`, such that `a < 0 < b` at every sampled offset `2^i <= 2^j`.
pub fn select_beta_offset(series: &Series) -> Result<f64> {
    let min = series.min_offset();
    let mut best = None;
    for j in (-64..=0).rev() {
        let eps = 2f64.powi(j);
        if eps < min {
            break;
        }
        let ok = series.real_jet_at(eps).map(|v| v[1] < 0.0 && v[2] > 0.0).unwrap_or(false);
        if ok {
            if best.is_none() {
                best = Some(eps);
            }
        } else {
            best = None;
        }
    }
    best.ok_or_else(|| Error::Domain(format!("no interval (alpha, beta) with a < 0 < b found for '{}'", series.label())))
}

/// `delta(sigma) = |b(sigma) c(sigma)|^{-1/5}` with `beta` from [`select_beta_offset`].
pub fn default_delta(series: &Series) -> Result<Witness> {
    let beta_offset = select_beta_offset(series)?;
    let s = series.clone();
    let delta: OffsetFn = Arc::new(move |eps| match s.real_jet_at(eps) {
        Ok(j) => bc_power_delta(j[2], j[3]),
        Err(_) => f64::NAN,
    });
    Ok(Witness { delta, t: None, beta_offset, source: WitnessSource::DefaultBcPower })
}

/// Default `delta` together with `T(sigma) = b(sigma)`.
pub fn tenenbaum_witness(series: &Series) -> Result<Witness> {
    let mut w = default_delta(series)?;
    let s = series.clone();
    w.t = Some(Arc::new(move |eps| s.real_jet_at(eps).map(|j| j[2]).unwrap_or(f64::NAN)));
    w.source = WitnessSource::Tenenbaum;
    Ok(w)
}

/// `delta(sigma) = min(delta_1, delta_2)`, `beta = min(beta_1, beta_2)`.
pub fn min_witness(w1: &Witness, w2: &Witness) -> Witness {
    let (d1, d2) = (w1.delta.clone(), w2.delta.clone());
    Witness {
        delta: Arc::new(move |eps| d1(eps).min(d2(eps))),
        t: None,
        beta_offset: w1.beta_offset.min(w2.beta_offset),
        source: WitnessSource::User,
    }
}

/// Offsets `(beta - alpha) 2^{-k}`, `k = 0..=K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub alpha: f64,
    pub offsets: Vec<f64>,
}

impl Grid {
    pub fn geometric(alpha: f64, beta_offset: f64, k: usize) -> Self {
        Grid { alpha, offsets: (0..=k).map(|i| beta_offset * 2f64.powi(-(i as i32))).collect() }
    }

    pub fn sigmas(&self) -> Vec<f64> {
        self.offsets.iter().map(|e| self.alpha + e).collect()
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}
