//! Truncated Taylor arithmetic in one complex variable.
//!
//! A [`Jet`] stores `f(s0 + z) = c0 + c1 z + c2 z^2 + c3 z^3 + O(z^4)`. It is used
//! to carry H together with its first three derivatives through closed-form
//! evaluators without writing every derivative by hand.

use num_complex::Complex64 as C64;
use std::ops::{Add, Div, Mul, Neg, Sub};

const ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet(pub [C64; ORDER]);

impl Jet {
    pub fn constant(v: C64) -> Self {
        let mut c = [C64::new(0.0, 0.0); ORDER];
        c[0] = v;
        Jet(c)
    }

    /// The independent variable at `s0`.
    pub fn variable(s0: C64) -> Self {
        let mut c = [C64::new(0.0, 0.0); ORDER];
        c[0] = s0;
        c[1] = C64::new(1.0, 0.0);
        Jet(c)
    }

    /// Jet of `base^{-s}` at `s0`, i.e. `exp(-s log base)`.
    pub fn pow_neg(log_base: f64, value: C64) -> Self {
        let mut c = [value; ORDER];
        let mut fact = 1.0;
        let mut p = 1.0;
        for (k, ck) in c.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
                p *= -log_base;
            }
            *ck = value * (p / fact);
        }
        Jet(c)
    }

    /// Jet from derivatives `[f, f', f'', f''']`.
    pub fn from_derivs(d: [C64; ORDER]) -> Self {
        Jet([d[0], d[1], d[2] * 0.5, d[3] / 6.0])
    }

    /// Jet of `f(l z)` given the jet of `f` in `z`.
    pub fn chain_scale(&self, l: f64) -> Self {
        let mut c = self.0;
        let mut p = 1.0;
        for ck in c.iter_mut() {
            *ck *= p;
            p *= l;
        }
        Jet(c)
    }

    pub fn value(&self) -> C64 {
        self.0[0]
    }

    /// Derivatives `[f, f', f'', f''']`.
    pub fn derivs(&self) -> [C64; ORDER] {
        [self.0[0], self.0[1], self.0[2] * 2.0, self.0[3] * 6.0]
    }

    pub fn scale(&self, k: C64) -> Self {
        Jet(self.0.map(|c| c * k))
    }

    pub fn recip(&self) -> Self {
        Jet::constant(C64::new(1.0, 0.0)) / *self
    }

    pub fn exp(&self) -> Self {
        let f0 = self.0[0].exp();
        let g = &self.0;
        let mut f = [C64::new(0.0, 0.0); ORDER];
        f[0] = f0;
        for k in 1..ORDER {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..=k {
                acc += g[j] * f[k - j] * j as f64;
            }
            f[k] = acc / k as f64;
        }
        Jet(f)
    }

    pub fn ln(&self) -> Self {
        let f = &self.0;
        let mut g = [C64::new(0.0, 0.0); ORDER];
        g[0] = f[0].ln();
        for k in 1..ORDER {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..k {
                acc += g[j] * f[k - j] * j as f64;
            }
            g[k] = (f[k] - acc / k as f64) / f[0];
        }
        Jet(g)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut out = Jet::constant(C64::new(1.0, 0.0));
        for _ in 0..n {
            out = out * *self;
        }
        out
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(o.0) {
            *a += b;
        }
        Jet(c)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(o.0) {
            *a -= b;
        }
        Jet(c)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet(self.0.map(|c| -c))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [C64::new(0.0, 0.0); ORDER];
        for i in 0..ORDER {
            for j in 0..ORDER - i {
                c[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(c)
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let mut q = [C64::new(0.0, 0.0); ORDER];
        for k in 0..ORDER {
            let mut acc = self.0[k];
            for j in 1..=k {
                acc -= o.0[j] * q[k - j];
            }
            q[k] = acc / o.0[0];
        }
        Jet(q)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, o: f64) -> Jet {
        self.0[0] += o;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn exp_ln_round_trip() {
        let s = Jet::variable(C64::new(0.3, 0.7));
        let f = (s * s + 1.0).exp();
        let back = f.ln();
        let direct = s * s + 1.0;
        for k in 0..ORDER {
            assert!(close(back.0[k], direct.0[k], 1e-13));
        }
    }

    #[test]
    fn derivatives_of_exp_s_squared() {
        // d/ds e^{s^2} = 2s e^{s^2}, second 2(1+2s^2)e^{s^2}, third (12 s + 8 s^3) e^{s^2}
        let s0 = C64::new(0.4, -0.2);
        let d = (Jet::variable(s0) * Jet::variable(s0)).exp().derivs();
        let e = (s0 * s0).exp();
        assert!(close(d[1], s0 * 2.0 * e, 1e-13));
        assert!(close(d[2], (s0 * s0 * 4.0 + 2.0) * e, 1e-13));
        assert!(close(d[3], (s0 * 12.0 + s0 * s0 * s0 * 8.0) * e, 1e-13));
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = Jet::variable(C64::new(1.5, 0.5)).exp();
        let b = Jet::variable(C64::new(1.5, 0.5)) + 2.0;
        let q = (a * b) / b;
        for k in 0..ORDER {
            assert!(close(q.0[k], a.0[k], 1e-13));
        }
    }

    #[test]
    fn pow_neg_matches_exp() {
        let s0 = C64::new(1.2, 3.0);
        let l = 5f64.ln();
        let direct = (Jet::variable(s0).scale(C64::new(-l, 0.0))).exp();
        let fast = Jet::pow_neg(l, (-s0 * l).exp());
        for k in 0..ORDER {
            assert!(close(fast.0[k], direct.0[k], 1e-13));
        }
    }
}
