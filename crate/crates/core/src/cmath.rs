//! Complex helpers that stay accurate near zero.

use num_complex::Complex64 as C64;

/// `e^z - 1` without cancellation for small `|z|`.
pub fn expm1(z: C64) -> C64 {
    let (x, y) = (z.re, z.im);
    let half = (0.5 * y).sin();
    C64::new(x.exp_m1() * y.cos() - 2.0 * half * half, x.exp() * y.sin())
}

/// Principal `log(1 + z)` without cancellation for small `|z|`.
pub fn log1p(z: C64) -> C64 {
    let (x, y) = (z.re, z.im);
    let re = 0.5 * (2.0 * x + x * x + y * y).ln_1p();
    C64::new(re, y.atan2(1.0 + x))
}

/// Natural log of `sum exp(v_i)` for finite or `-inf` entries.
pub fn log_sum_exp(vals: &[f64]) -> f64 {
    let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + vals.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}
