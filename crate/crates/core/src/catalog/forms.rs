//! Closed-form evaluators for the catalog series.
//!
//! Every form works in the offset `eps = sigma - alpha` and splits off the
//! singular part at the abscissa so that increments and Taylor remainders are
//! computed without cancellation even for `eps` near `1e-19`.

use crate::cmath::{expm1, log1p};
use crate::jet::Jet;
use crate::series::{remainder_integral_form, ClosedForm, Majorant};
use crate::zeta;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Remainder of the pole `1/(l s)` at `s = eps + it`: `(1/(l eps)) i u^3/(1+iu)`, `u = t/eps`.
fn pole_remainder(l: f64, eps: f64, t: f64) -> C64 {
    let u = t / eps;
    I * (u * u * u) / (C64::new(1.0, u) * (l * eps))
}

/// Remainder of `-log(s)` at `s = eps + it`, a function of `u = t/eps` only.
fn log_remainder(u: f64) -> C64 {
    let z = C64::new(0.0, u);
    if u.abs() < 0.25 {
        // -(log(1+z) - z + z^2/2) = -sum_{n>=3} (-1)^{n+1} z^n / n
        let mut acc = C64::new(0.0, 0.0);
        let mut zn = z * z * z;
        for n in 3..48 {
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            acc += zn * (sign / n as f64);
            zn *= z;
        }
        -acc
    } else {
        -log1p(z) + z - z * z * 0.5
    }
}

/// Remainder from jets of an analytic part at `eps` and `eps + it`.
fn jet_remainder(at_t: &Jet, at_0: &Jet, t: f64) -> C64 {
    let d0 = at_0.derivs();
    at_t.value() - d0[0] - I * d0[1] * t + d0[2] * (0.5 * t * t)
}

fn bernoulli_over_factorial() -> &'static [f64; 14] {
    static TABLE: OnceLock<[f64; 14]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut b = [0.0; 14];
        for (m, v) in b.iter_mut().enumerate() {
            let k = 2 * (m + 1);
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            *v = sign * 2.0 * zeta::zeta_real(k as f64) / (2.0 * PI).powi(k as i32);
        }
        b
    })
}

fn multiples(period: f64, t_max: f64, cap: usize) -> Vec<f64> {
    let n = ((t_max / period).floor() as usize).min(cap);
    (1..=n).map(|m| m as f64 * period).collect()
}

/// `H(s) = zeta(s - lambda)`, abscissa `1 + lambda`.
#[derive(Debug, Clone)]
pub struct ExpZetaForm;

impl ClosedForm for ExpZetaForm {
    fn jet(&self, eps: f64, t: f64) -> [C64; 4] {
        zeta::zeta_jet(C64::new(eps, t)).derivs()
    }

    fn increment(&self, eps: f64, t: f64) -> C64 {
        let w = C64::new(eps, t);
        -I * t / (w * eps) + zeta::regular_increment(eps, t)
    }

    fn remainder(&self, eps: f64, t: f64) -> C64 {
        let g1 = zeta::regular(C64::new(eps, t));
        let g0 = zeta::regular(c(eps));
        pole_remainder(1.0, eps, t) + jet_remainder(&g1, &g0, t)
    }

    fn majorant(&self) -> Majorant {
        Majorant::Envelope(Arc::new(zeta::envelope_log))
    }
}

/// `H(s) = zeta(s)^k`, abscissa 1.
#[derive(Debug, Clone)]
pub struct ExpZetaPowForm {
    pub k: u32,
}

impl ClosedForm for ExpZetaPowForm {
    fn jet(&self, eps: f64, t: f64) -> [C64; 4] {
        zeta::zeta_jet(C64::new(eps, t)).powi(self.k).derivs()
    }

    fn increment(&self, eps: f64, t: f64) -> C64 {
        let w = C64::new(eps, t);
        let g0 = c(zeta::regular_real(eps));
        let dg = zeta::regular_increment(eps, t);
        let z1 = w.inv() + g0 + dg;
        let z0 = c(1.0 / eps) + g0;
        let dz = -I * t / (w * eps) + dg;
        let mut sum = C64::new(0.0, 0.0);
        for j in 0..self.k {
            sum += z1.powu(j) * z0.powu(self.k - 1 - j);
        }
        dz * sum
    }

    fn remainder(&self, eps: f64, t: f64) -> C64 {
        remainder_integral_form(self, eps, t, 0.25 * eps)
    }

    fn majorant(&self) -> Majorant {
        let k = self.k as i32;
        Majorant::Envelope(Arc::new(move |lt| zeta::envelope_log(lt).powi(k)))
    }
}

/// `H(s) = 1/(1 - k^{-s})`, abscissa 0.
#[derive(Debug, Clone)]
pub struct ExpGeomForm {
    pub k: u64,
    log_k: f64,
}

impl ExpGeomForm {
    pub fn new(k: u64) -> Self {
        ExpGeomForm { k, log_k: (k as f64).ln() }
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.log_k
    }

    /// Jet in `v = s log k` of `1 + 1/(e^v - 1) - 1/v`, which is entire near 0.
    fn regular_v(v: C64) -> Jet {
        let vj = Jet::variable(v);
        if v.norm() < 1.0 {
            let b = bernoulli_over_factorial();
            let v2 = vj * vj;
            let mut p = Jet::constant(c(b[b.len() - 1]));
            for &bm in b.iter().rev().skip(1) {
                p = p * v2 + bm;
            }
            vj * p + 0.5
        } else {
            let mut e = vj.exp();
            e.0[0] = expm1(v);
            e.recip() - vj.recip() + 1.0
        }
    }
}

impl ClosedForm for ExpGeomForm {
    fn jet(&self, eps: f64, t: f64) -> [C64; 4] {
        let l = self.log_k;
        let e = expm1(C64::new(eps, t) * l);
        let u = e + 1.0;
        let h = e.inv() + 1.0;
        let a = -u * l / (e * e);
        let b = (u * u + u) * (l * l) / (e * e * e);
        let cc = -(u * u * u + u * u * 4.0 + u) * (l * l * l) / (e * e * e * e);
        [h, a, b, cc]
    }

    fn increment(&self, eps: f64, t: f64) -> C64 {
        let l = self.log_k;
        let v0 = eps * l;
        let e0 = c(v0.exp_m1());
        let e1 = expm1(C64::new(eps, t) * l);
        let diff = -expm1(C64::new(0.0, t * l)) * v0.exp();
        diff / (e1 * e0)
    }

    fn remainder(&self, eps: f64, t: f64) -> C64 {
        let l = self.log_k;
        let r1 = Self::regular_v(C64::new(eps, t) * l).chain_scale(l);
        let r0 = Self::regular_v(c(eps * l)).chain_scale(l);
        pole_remainder(l, eps, t) + jet_remainder(&r1, &r0, t)
    }

    fn majorant(&self) -> Majorant {
        Majorant::Periodic(self.period())
    }

    fn peaks(&self, t_max: f64) -> Vec<f64> {
        multiples(self.period(), t_max, 4096)
    }
}

/// `H(s) = -sum_j m_j log(1 - n_j^{-s})`, abscissa 0.
#[derive(Debug, Clone)]
pub struct FgForm {
    /// `(log n_j, m_j)`
    gens: Vec<(f64, f64)>,
}

impl FgForm {
    pub fn new(gens: &[(u64, u32)]) -> Self {
        FgForm { gens: gens.iter().map(|&(n, m)| ((n as f64).ln(), m as f64)).collect() }
    }

    /// Jet in `v` of `-log((1 - e^{-v})/v)`.
    fn regular_v(v: C64) -> Jet {
        let vj = Jet::variable(v);
        let phi = if v.norm() < 0.5 {
            const TERMS: usize = 24;
            let mut coef = [1.0; TERMS + 1];
            for n in 1..=TERMS {
                coef[n] = -coef[n - 1] / (n + 1) as f64;
            }
            let mut p = Jet::constant(c(coef[TERMS]));
            for &cn in coef.iter().rev().skip(1) {
                p = p * vj + cn;
            }
            p
        } else {
            let mut e = (-vj).exp();
            e.0[0] = expm1(-v);
            (-e) / vj
        };
        -phi.ln()
    }
}

impl ClosedForm for FgForm {
    fn jet(&self, eps: f64, t: f64) -> [C64; 4] {
        let mut out = [C64::new(0.0, 0.0); 4];
        for &(l, m) in &self.gens {
            let v = C64::new(eps, t) * l;
            let e = expm1(v);
            let u = e + 1.0;
            let h = -(-expm1(-v)).ln();
            let d1 = -e.inv() * l;
            let d2 = u / (e * e) * (l * l);
            let d3 = -u * (e + 2.0) / (e * e * e) * (l * l * l);
            for (o, d) in out.iter_mut().zip([h, d1, d2, d3]) {
                *o += d * m;
            }
        }
        out
    }

    fn increment(&self, eps: f64, t: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &(l, m) in &self.gens {
            let v0 = eps * l;
            let a0 = -(-v0).exp_m1();
            let diff = -expm1(C64::new(0.0, -t * l)) * (-v0).exp();
            acc -= log1p(diff / a0) * m;
        }
        acc
    }

    fn remainder(&self, eps: f64, t: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let rp = log_remainder(t / eps);
        for &(l, m) in &self.gens {
            let q1 = Self::regular_v(C64::new(eps, t) * l).chain_scale(l);
            let q0 = Self::regular_v(c(eps * l)).chain_scale(l);
            acc += (rp + jet_remainder(&q1, &q0, t)) * m;
        }
        acc
    }

    fn majorant(&self) -> Majorant {
        if self.gens.len() == 1 {
            return Majorant::Periodic(2.0 * PI / self.gens[0].0);
        }
        let factors = self
            .gens
            .iter()
            .take(3)
            .map(|&g| Arc::new(FgForm { gens: vec![g] }) as Arc<dyn ClosedForm>)
            .collect();
        Majorant::Factors(factors)
    }

    fn peaks(&self, t_max: f64) -> Vec<f64> {
        let mut v: Vec<f64> = self.gens.iter().take(8).flat_map(|&(l, _)| multiples(2.0 * PI / l, t_max, 512)).collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        v
    }
}

/// `H(s) = k log zeta(s)`, abscissa 1.
#[derive(Debug, Clone)]
pub struct ZetaPowForm {
    pub k: u32,
}

impl ZetaPowForm {
    /// Jet of `log(1 + w g(w)) = log(w zeta(1+w))`.
    fn regular(w: C64) -> Jet {
        (Jet::variable(w) * zeta::regular(w) + 1.0).ln()
    }
}

impl ClosedForm for ZetaPowForm {
    fn jet(&self, eps: f64, t: f64) -> [C64; 4] {
        let w = C64::new(eps, t);
        let h = Self::regular(w) - Jet::variable(w).ln();
        h.scale(c(self.k as f64)).derivs()
    }

    fn increment(&self, eps: f64, t: f64) -> C64 {
        let w = C64::new(eps, t);
        let p1 = w * zeta::regular_value(w);
        let p0 = eps * zeta::regular_real(eps);
        let d = -log1p(C64::new(0.0, t / eps)) + log1p((p1 - p0) / (1.0 + p0));
        d * self.k as f64
    }

    fn remainder(&self, eps: f64, t: f64) -> C64 {
        let q1 = Self::regular(C64::new(eps, t));
        let q0 = Self::regular(c(eps));
        (log_remainder(t / eps) + jet_remainder(&q1, &q0, t)) * self.k as f64
    }

    fn majorant(&self) -> Majorant {
        let k = self.k as f64;
        Majorant::Envelope(Arc::new(move |lt| k * zeta::envelope_log(lt).ln()))
    }
}
