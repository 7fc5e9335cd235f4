//! Riemann zeta near its pole.
//!
//! `zeta(1 + w) = 1/w + g(w)`; [`regular`] returns the Taylor jet of `g` so that
//! callers can combine the pole and the entire part without cancellation.

use crate::jet::Jet;
use num_complex::Complex64 as C64;
use std::cell::Cell;
use std::sync::OnceLock;

/// `B_{2j} / (2j)!` for j = 1..=7.
const BERNOULLI_OVER_FACT: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
];

const CORRECTIONS: usize = 6;

fn cutoff(s: C64) -> usize {
    // for large real parts the terms past 80 are far below rounding, so only |t| drives the cutoff
    (s.im.abs().max(s.norm().min(64.0)).ceil() as usize) + 16
}

/// Jet of `(N^{-w} - 1)/w`, the entire part of `N^{1-s}/(s-1)`.
fn tail_regular(w: C64, log_n: f64) -> Jet {
    let wj = Jet::variable(w);
    let z = wj.scale(C64::new(-log_n, 0.0));
    if (w * log_n).norm() < 0.5 {
        // (e^z - 1)/z = sum z^m/(m+1)!
        const TERMS: usize = 24;
        let mut coef = [1.0; TERMS + 1];
        for m in 1..=TERMS {
            coef[m] = coef[m - 1] / (m + 1) as f64;
        }
        let mut phi = Jet::constant(C64::new(coef[TERMS], 0.0));
        for m in (0..TERMS).rev() {
            phi = phi * z + coef[m];
        }
        phi.scale(C64::new(-log_n, 0.0))
    } else {
        (z.exp() + -1.0) / wj
    }
}

/// Jet of `g(w) = zeta(1+w) - 1/w` at `w` (derivatives with respect to `s`).
pub fn regular(w: C64) -> Jet {
    let s0 = w + 1.0;
    let n = cutoff(s0);
    let mut acc = Jet::constant(C64::new(0.0, 0.0));
    for m in 1..n {
        let l = (m as f64).ln();
        acc = acc + Jet::pow_neg(l, (-s0 * l).exp());
    }
    let log_n = (n as f64).ln();
    let pn = Jet::pow_neg(log_n, (-s0 * log_n).exp());
    acc = acc + pn.scale(C64::new(0.5, 0.0)) + tail_regular(w, log_n);

    let s = Jet::variable(s0);
    let mut rising = s;
    let inv_n = 1.0 / n as f64;
    let mut npow = inv_n;
    for (j, &coef) in BERNOULLI_OVER_FACT.iter().enumerate().take(CORRECTIONS) {
        if j > 0 {
            rising = rising * (s + (2 * j - 1) as f64) * (s + (2 * j) as f64);
            npow *= inv_n * inv_n;
        }
        acc = acc + (rising * pn).scale(C64::new(coef * npow, 0.0));
    }
    acc
}

const LOG_TABLE: usize = 8192;

fn log_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| (0..LOG_TABLE).map(|m| (m.max(1) as f64).ln()).collect())
}

/// Value of [`regular`], without the derivative bookkeeping.
pub fn regular_value(w: C64) -> C64 {
    let s0 = w + 1.0;
    let n = cutoff(s0);
    let table = log_table();
    let ln = |m: usize| if m < LOG_TABLE { table[m] } else { (m as f64).ln() };
    let mut acc = C64::new(0.0, 0.0);
    for m in 1..n {
        let l = ln(m);
        let (sin, cos) = (-s0.im * l).sin_cos();
        acc += C64::new(cos, sin) * (-s0.re * l).exp();
    }
    let log_n = ln(n);
    let pn = (-s0 * log_n).exp();
    let z = -w * log_n;
    let tail = if z.norm() < 0.5 {
        let mut phi = C64::new(0.0, 0.0);
        let mut term = C64::new(-log_n, 0.0);
        for m in 0..24 {
            phi += term;
            term = term * z / (m + 2) as f64;
        }
        phi
    } else {
        (z.exp() - 1.0) / w
    };
    acc += pn * 0.5 + tail;
    let inv_n = 1.0 / n as f64;
    let mut rising = s0;
    let mut npow = inv_n;
    for (j, &coef) in BERNOULLI_OVER_FACT.iter().enumerate().take(CORRECTIONS) {
        if j > 0 {
            rising = rising * (s0 + (2 * j - 1) as f64) * (s0 + (2 * j) as f64);
            npow *= inv_n * inv_n;
        }
        acc += rising * pn * (coef * npow);
    }
    acc
}

thread_local! {
    static LAST_REAL: Cell<(f64, f64)> = const { Cell::new((f64::NAN, 0.0)) };
}

/// `g(eps)` for real `eps > 0`; repeated calls with the same argument are cached per thread.
pub fn regular_real(eps: f64) -> f64 {
    LAST_REAL.with(|c| {
        let (e, v) = c.get();
        if e == eps {
            return v;
        }
        let v = regular_value(C64::new(eps, 0.0)).re;
        c.set((eps, v));
        v
    })
}

thread_local! {
    static LAST_JET: Cell<(f64, [C64; 4])> = const { Cell::new((f64::NAN, [C64 { re: 0.0, im: 0.0 }; 4])) };
}

/// `g(eps + it) - g(eps)` for real `eps > 0`. Small `|t|` goes through the Taylor
/// jet at `eps`, so the difference keeps its relative accuracy.
pub fn regular_increment(eps: f64, t: f64) -> C64 {
    if t.abs() >= 1e-4 {
        return regular_value(C64::new(eps, t)) - regular_real(eps);
    }
    let c = LAST_JET.with(|cell| {
        let (e, v) = cell.get();
        if e == eps {
            return v;
        }
        let v = regular(C64::new(eps, 0.0)).0;
        cell.set((eps, v));
        v
    });
    let z = C64::new(0.0, t);
    ((c[3] * z + c[2]) * z + c[1]) * z
}

/// Jet of `1/w` at `w`.
pub fn pole(w: C64) -> Jet {
    Jet::variable(w).recip()
}

/// Jet of `zeta(1 + w)`.
pub fn zeta_jet(w: C64) -> Jet {
    pole(w) + regular(w)
}

/// `zeta(s)` for real `s > 1`, computed through the pole split.
pub fn zeta_real(s: f64) -> f64 {
    zeta_jet(C64::new(s - 1.0, 0.0)).value().re
}

/// Explicit bound `|zeta(sigma+it)| <= log(|t|+1) + 3.5`, valid for `sigma > 1`, `|t| >= 1`.
pub fn envelope(t: f64) -> f64 {
    (t.abs() + 1.0).ln() + 3.5
}

/// [`envelope`] as a function of `ln |t|`, usable far past `f64` range in `t`.
pub fn envelope_log(ln_t: f64) -> f64 {
    ln_t + (-ln_t).exp().ln_1p() + 3.5
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_path_matches_jet_path() {
        for w in [C64::new(1e-9, 0.0), C64::new(0.3, 2.0), C64::new(1e-6, 300.0), C64::new(2.0, -40.0), C64::new(1e-12, 0.1)] {
            let a = regular_value(w);
            let b = regular(w).value();
            assert!((a - b).norm() < 1e-13 * (1.0 + b.norm()), "{w}: {a} vs {b}");
        }
        assert_eq!(regular_real(0.25), regular_value(C64::new(0.25, 0.0)).re);
    }

    #[test]
    fn small_increment_matches_difference() {
        for (eps, t) in [(1e-3, 5e-5), (0.5, 9e-5), (1e-12, 1e-5), (2.0, 1e-3)] {
            let inc = regular_increment(eps, t);
            let direct = regular(C64::new(eps, t)).value() - regular(C64::new(eps, 0.0)).value();
            assert!((inc - direct).norm() < 1e-15 + 1e-9 * direct.norm(), "{eps} {t}: {inc} vs {direct}");
        }
    }

    #[test]
    fn zeta_two_and_four() {
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((zeta_real(2.0) - pi2 / 6.0).abs() < 1e-15);
        assert!((zeta_real(4.0) - pi2 * pi2 / 90.0).abs() < 1e-15);
    }

    #[test]
    fn euler_constant_at_pole() {
        // g(0) = gamma_0 and g'(0) = -gamma_1 (Stieltjes constants)
        let g = regular(C64::new(0.0, 0.0)).derivs();
        assert!((g[0].re - 0.577_215_664_901_532_9).abs() < 1e-14);
        assert!((g[1].re - 0.072_815_845_483_676_72).abs() < 1e-14);
    }

    // g(w) = zeta(1+w) - 1/w and its first three derivatives, 40-digit reference values.
    const REFERENCE: [((f64, f64), [(f64, f64); 4]); 7] = [
        ((0.001, 0.0), [(0.57728847590149273, 0.0), (0.072806154093954171, 0.0), (-0.0096924158647398197, 0.0), (-0.0020515094469395601, 0.0)]),
        ((0.5, 0.0), [(0.61237534868548834, 0.0), (0.067760262568898489, 0.0), (-0.01044362877431325, 0.0), (-0.00099400673554119837, 0.0)]),
        ((0.01, 5.0), [(0.7608902518284494, 0.37758185593450778), (0.067083024457743511, -0.096611434341246596), (-0.035702767663065065, 0.018077170188605422), (0.018236491180249826, 0.0052592411592597408)]),
        ((0.3, -40.0), [(0.86737059889677604, 0.30438453197155007), (0.049655339599982258, -0.41847905701177655), (-0.043050198367418993, 0.67617195741456191), (0.13331327046004949, -1.2300476798828715)]),
        ((1.0e-8, 0.2), [(0.57740962793983161, 0.014565905406348066), (0.072856869139591448, -0.0019411737719158472), (-0.0097368865012044684, -0.00040970770829924098), (-0.0020379327710927698, 0.00046539143111016885)]),
        ((2.0, 100.0), [(1.0955986533830101, -0.018468248179866695), (-0.060160529008279071, 0.019787011765145096), (0.041255682623957269, -0.011944853844786024), (-0.044269867590057152, 0.0029024305844660035)]),
        ((0.05, 700.0), [(0.57928234425487485, -0.52415122318579285), (0.54035374411147939, 0.31674018240888367), (-0.99496487942648065, -0.51427442610868998), (4.1237016860478095, 2.7113513959391487)]),
    ];

    #[test]
    fn regular_part_matches_reference() {
        for ((wr, wi), want) in REFERENCE {
            let got = regular(C64::new(wr, wi)).derivs();
            for k in 0..4 {
                let w = C64::new(want[k].0, want[k].1);
                let err = (got[k] - w).norm();
                assert!(err < 1e-12 * (1.0 + w.norm()), "w=({wr},{wi}) k={k} got={} want={w}", got[k]);
            }
        }
    }
}
