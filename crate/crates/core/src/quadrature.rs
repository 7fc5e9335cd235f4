//! Quadrature rules shared by the Perron and admissibility code.

use num_complex::Complex64 as C64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: C64,
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

/// 15-point Kronrod estimate and its difference to the embedded 7-point Gauss rule.
pub fn gauss_kronrod<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

struct Piece {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error.total_cmp(&o.error) == Ordering::Equal && self.a.total_cmp(&o.a) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error).then_with(|| o.a.total_cmp(&self.a))
    }
}

/// Globally adaptive Gauss-Kronrod integration over consecutive `breaks`.
///
/// Stops when the summed error estimate is below `max(abs_tol, rel_tol*|I|)` or
/// after `max_pieces` subintervals, in which case `converged` is false.
pub fn integrate<F: Fn(f64) -> C64>(f: F, breaks: &[f64], abs_tol: f64, rel_tol: f64, max_pieces: usize) -> Integral {
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let (value, error) = gauss_kronrod(&f, w[0], w[1]);
            evals += 15;
            heap.push(Piece { a: w[0], b: w[1], value, error });
        }
    }
    let total = |heap: &BinaryHeap<Piece>| {
        let mut v: Vec<&Piece> = heap.iter().collect();
        v.sort_by(|p, q| p.a.total_cmp(&q.a));
        let value: C64 = v.iter().map(|p| p.value).sum();
        let error: f64 = v.iter().map(|p| p.error).sum();
        (value, error)
    };
    let (mut value, mut error) = total(&heap);
    let mut converged = false;
    loop {
        if error <= abs_tol.max(rel_tol * value.norm()) || !error.is_finite() {
            converged = error.is_finite();
            break;
        }
        if heap.len() >= max_pieces {
            break;
        }
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            heap.push(p);
            break;
        }
        let (v1, e1) = gauss_kronrod(&f, p.a, m);
        let (v2, e2) = gauss_kronrod(&f, m, p.b);
        evals += 30;
        value += v1 + v2 - p.value;
        error += e1 + e2 - p.error;
        heap.push(Piece { a: p.a, b: m, value: v1, error: e1 });
        heap.push(Piece { a: m, b: p.b, value: v2, error: e2 });
        if heap.len() % 64 == 0 {
            (value, error) = total(&heap);
        }
    }
    let (value, error) = total(&heap);
    Integral { value, error, evals, converged: converged || error <= abs_tol.max(rel_tol * value.norm()) }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Simpson rule with `n` (rounded up to even) subintervals.
pub fn simpson<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, n: usize) -> C64 {
    let n = n.max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(a + i as f64 * h) * w;
    }
    acc * (h / 3.0)
}
