//! Built-in series with closed forms, coefficient generators and expected classifications.

pub mod forms;
pub mod sieve;

use crate::admissibility::{default_delta, tenenbaum_witness, Classification, Witness, WitnessSource};
use crate::error::{Error, Result};
use crate::series::{dirichlet_exp, dirichlet_mul, ClosedForm, ClosedFormSeries, CoefficientSeries, LogCoefficients, Series};
use forms::{ExpGeomForm, ExpZetaForm, ExpZetaPowForm, FgForm, ZetaPowForm};
use std::fmt;
use std::sync::Arc;

/// Default grid depth for catalog diagnostics.
pub const DEFAULT_DEPTH: usize = 64;
/// Largest `y` accepted for partial Euler products.
pub const MAX_Y: f64 = 1e6;
/// Largest truncation accepted by the coefficient generators.
pub const MAX_N: usize = 100_000_000;

type Generator = Arc<dyn Fn(usize) -> Result<Vec<f64>> + Send + Sync>;

/// A catalog series with its expected classification and witness.
#[derive(Clone)]
pub struct CatalogEntry {
    pub key: String,
    pub series: Series,
    pub expected: Classification,
    pub witness: Option<Witness>,
    /// Recommended sigma-grid depth K.
    pub depth: usize,
    generator: Generator,
}

impl fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("key", &self.key)
            .field("alpha", &self.series.alpha())
            .field("expected", &self.expected)
            .finish()
    }
}

impl CatalogEntry {
    fn new(key: String, alpha: f64, form: Arc<dyn ClosedForm>, expected: Classification, generator: Generator) -> Self {
        let series = Series::ClosedForm(ClosedFormSeries::new(key.clone(), alpha, form));
        CatalogEntry { key, series, expected, witness: None, depth: DEFAULT_DEPTH, generator }
    }

    pub fn alpha(&self) -> f64 {
        self.series.alpha()
    }

    /// Generate `f(1..=n)`.
    pub fn coefficients(&self, n: usize) -> Result<CoefficientSeries> {
        if n == 0 || n > MAX_N {
            return Err(Error::Range(format!("N = {n} outside 1..={MAX_N}")));
        }
        let v = (self.generator)(n)?;
        CoefficientSeries::new(v, self.alpha(), self.key.clone())
    }

    /// Attach generated coefficients `f(1..=n)` to the closed form.
    pub fn with_coefficients(mut self, n: usize) -> Result<Self> {
        let c = self.coefficients(n)?;
        if let Series::ClosedForm(cf) = &mut self.series {
            cf.coefficients = Some(c);
        }
        Ok(self)
    }

    /// The catalog witness, or the default `|bc|^{-1/5}` one.
    pub fn witness(&self) -> Result<Witness> {
        match &self.witness {
            Some(w) => Ok(w.clone()),
            None => default_delta(&self.series),
        }
    }
}

fn exp_of(h: Vec<f64>, alpha: f64, label: &str) -> Result<Vec<f64>> {
    let h = LogCoefficients::new(h, label)?;
    Ok(dirichlet_exp(&h, alpha)?.as_slice().to_vec())
}

fn divisor_k(n: usize, k: u32) -> Vec<f64> {
    let ones = CoefficientSeries::ones(n);
    let mut acc = CoefficientSeries::unit(n, 1.0).expect("unit series");
    for _ in 0..k {
        acc = dirichlet_mul(&acc, &ones);
    }
    acc.as_slice().to_vec()
}

/// `exp(zeta(s - lambda))`, abscissa `1 + lambda`; T-admissible with `T(sigma) = b(sigma)`.
pub fn make_exp_zeta(lambda: f64) -> Result<CatalogEntry> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Invalid(format!("lambda = {lambda} must be a finite real >= 0")));
    }
    let key = if lambda == 0.0 { "exp_zeta".to_string() } else { format!("exp_zeta_shift:{lambda}") };
    let label = key.clone();
    let gen: Generator = Arc::new(move |n| {
        let h = (1..=n).map(|m| (m as f64).powf(lambda)).collect();
        exp_of(h, 1.0 + lambda, &label)
    });
    let mut e = CatalogEntry::new(key, 1.0 + lambda, Arc::new(ExpZetaForm), Classification::TAdmissible, gen);
    e.witness = Some(tenenbaum_witness(&e.series)?);
    Ok(e)
}

/// `exp(1/(1 - k^{-s}))`, abscissa 0; admissible with `delta_k = (k^sigma - 1)^{7/5}` but not
/// T-admissible with `T_k = (k^sigma - 1)^{-3}`.
pub fn make_exp_geometric(k: u64) -> Result<CatalogEntry> {
    if k < 2 {
        return Err(Error::Invalid(format!("k = {k} must be >= 2")));
    }
    let key = format!("exp_geom:{k}");
    let label = key.clone();
    let gen: Generator = Arc::new(move |n| {
        let mut h = vec![0.0; n];
        h[0] = 1.0;
        let mut p = k as usize;
        while p <= n {
            h[p - 1] = 1.0;
            match p.checked_mul(k as usize) {
                Some(q) => p = q,
                None => break,
            }
        }
        exp_of(h, 0.0, &label)
    });
    let mut e = CatalogEntry::new(key, 0.0, Arc::new(ExpGeomForm::new(k)), Classification::Admissible, gen);
    let l = (k as f64).ln();
    e.witness = Some(Witness {
        delta: Arc::new(move |eps: f64| (eps * l).exp_m1().powf(1.4)),
        t: Some(Arc::new(move |eps: f64| (eps * l).exp_m1().powi(-3))),
        // keeps delta_k < 1 on the whole grid
        beta_offset: 0.5 * std::f64::consts::LN_2 / l,
        source: WitnessSource::User,
    });
    Ok(e)
}

/// `zeta(s, y) = prod_{p <= y} (1 - p^{-s})^{-1}`, abscissa 0; not admissible.
pub fn make_partial_euler(y: f64) -> Result<CatalogEntry> {
    if !(y >= 2.0) || y > MAX_Y {
        return Err(Error::Invalid(format!("y = {y} must lie in [2, {MAX_Y}]")));
    }
    let primes = sieve::primes_up_to(y.floor() as usize);
    let gens: Vec<(u64, u32)> = primes.iter().map(|&p| (p as u64, 1)).collect();
    let key = format!("zeta_y:{y}");
    let ymax = y.floor() as usize;
    let gen: Generator = Arc::new(move |n| Ok(sieve::smooth_indicator(n, ymax)));
    let mut e = CatalogEntry::new(key, 0.0, Arc::new(FgForm::new(&gens)), Classification::NotAdmissible, gen);
    e.witness = Some(default_delta(&e.series)?);
    Ok(e)
}

/// `zeta(s)^k`, abscissa 1; not admissible.
pub fn make_zeta_pow(k: u32) -> Result<CatalogEntry> {
    if k < 1 {
        return Err(Error::Invalid("k must be >= 1".into()));
    }
    let key = format!("zeta_pow:{k}");
    let gen: Generator = Arc::new(move |n| Ok(divisor_k(n, k)));
    let mut e = CatalogEntry::new(key, 1.0, Arc::new(ZetaPowForm { k }), Classification::NotAdmissible, gen);
    e.witness = Some(default_delta(&e.series)?);
    Ok(e)
}

/// `prod_j (1 - n_j^{-s})^{-m_j}`, abscissa 0; not admissible.
pub fn make_fg_multiplicative(generators: &[(u64, u32)]) -> Result<CatalogEntry> {
    if generators.is_empty() {
        return Err(Error::Invalid("at least one generator is required".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &(n, m) in generators {
        if n < 2 || m < 1 {
            return Err(Error::Invalid(format!("generator {n}^{m} needs n >= 2 and m >= 1")));
        }
        if !seen.insert(n) {
            return Err(Error::Invalid(format!("duplicate generator {n}")));
        }
    }
    let key = format!("fg:{}", generators.iter().map(|(n, m)| format!("{n}^{m}")).collect::<Vec<_>>().join(","));
    let g = generators.to_vec();
    let gen: Generator = Arc::new(move |n| Ok(sieve::multiset_counts(n, &g)));
    let mut e = CatalogEntry::new(key, 0.0, Arc::new(FgForm::new(generators)), Classification::NotAdmissible, gen);
    e.witness = Some(default_delta(&e.series)?);
    Ok(e)
}

/// `exp(zeta(s)^k)`, abscissa 1; T-admissible with `T(sigma) = b(sigma)`.
pub fn make_exp_zeta_pow(k: u32) -> Result<CatalogEntry> {
    if k < 1 {
        return Err(Error::Invalid("k must be >= 1".into()));
    }
    if k == 1 {
        let mut e = make_exp_zeta(0.0)?;
        e.key = "exp_zeta_pow:1".into();
        if let Series::ClosedForm(c) = &mut e.series {
            c.label = e.key.clone();
        }
        return Ok(e);
    }
    let key = format!("exp_zeta_pow:{k}");
    let label = key.clone();
    let gen: Generator = Arc::new(move |n| exp_of(divisor_k(n, k), 1.0, &label));
    let mut e = CatalogEntry::new(key, 1.0, Arc::new(ExpZetaPowForm { k }), Classification::TAdmissible, gen);
    e.witness = Some(tenenbaum_witness(&e.series)?);
    Ok(e)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Invalid(format!("bad parameter '{v}' in catalog key '{key}'")))
}

/// Look up a catalog key such as `exp_geom:2` or `fg:2^1,3^2`.
pub fn from_key(key: &str) -> Result<CatalogEntry> {
    let (name, arg) = match key.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (key, None),
    };
    let need = || arg.ok_or_else(|| Error::Invalid(format!("catalog key '{key}' needs a parameter")));
    match name {
        "exp_zeta" if arg.is_none() => make_exp_zeta(0.0),
        "exp_zeta_shift" => make_exp_zeta(parse_num(key, need()?)?),
        "exp_zeta_pow" => make_exp_zeta_pow(parse_num(key, need()?)?),
        "exp_geom" => make_exp_geometric(parse_num(key, need()?)?),
        "zeta_y" => make_partial_euler(parse_num(key, need()?)?),
        "zeta_pow" => make_zeta_pow(parse_num(key, need()?)?),
        "fg" => {
            let mut gens = Vec::new();
            for part in need()?.split(',') {
                let (n, m) = match part.split_once('^') {
                    Some((n, m)) => (parse_num(key, n)?, parse_num(key, m)?),
                    None => (parse_num(key, part)?, 1),
                };
                gens.push((n, m));
            }
            make_fg_multiplicative(&gens)
        }
        _ => Err(Error::Invalid(format!("unknown catalog key '{key}'"))),
    }
}

/// Keys of the entries used by the classification regression.
pub const REGRESSION_KEYS: [&str; 9] = [
    "exp_zeta",
    "exp_zeta_shift:1",
    "exp_zeta_pow:2",
    "exp_geom:2",
    "exp_geom:3",
    "zeta_pow:1",
    "zeta_pow:2",
    "zeta_y:5",
    "fg:2^1,3^2",
];

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn exp_zeta_entry() {
        let e = from_key("exp_zeta").unwrap().with_coefficients(16).unwrap();
        assert_eq!(e.alpha(), 1.0);
        let c = e.series.coefficients().unwrap();
        assert!((c.coeff(1) - E).abs() < 1e-15);
        assert_eq!(from_key("exp_zeta_shift:1").unwrap().alpha(), 2.0);
        let h = from_key("exp_zeta_shift:1").unwrap().coefficients(8).unwrap();
        let logs = h.log_coefficients().unwrap();
        for n in 1..=8 {
            assert!((logs.coeff(n) - n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn geometric_entry() {
        let e = from_key("exp_geom:2").unwrap();
        let c = e.coefficients(64).unwrap();
        let h = c.log_coefficients().unwrap();
        for n in 1..=64usize {
            let want = if n.is_power_of_two() { 1.0 } else { 0.0 };
            assert!((h.coeff(n) - want).abs() < 1e-12);
        }
        assert!((c.coeff(1) - E).abs() < 1e-15);
        assert!(from_key("exp_geom:1").is_err());
        let big = e.series.eval_f(num_complex::Complex64::new(40.0, 0.0)).unwrap().value.re;
        assert!((big - E).abs() < 1e-10);
        let at_one = e.series.eval_f(num_complex::Complex64::new(1.0, 0.0)).unwrap().value.re;
        assert!((at_one - E * E).abs() < 1e-13);
    }

    #[test]
    fn divisor_entries() {
        let z2 = from_key("zeta_pow:2").unwrap().coefficients(12).unwrap();
        assert_eq!(z2.coeff(6), 4.0);
        let z3 = from_key("zeta_pow:3").unwrap().coefficients(12).unwrap();
        assert_eq!(z3.coeff(4), 6.0);
        let z1 = from_key("zeta_pow:1").unwrap().coefficients(12).unwrap();
        assert!(z1.as_slice().iter().all(|v| *v == 1.0));
        let ez2 = from_key("exp_zeta_pow:2").unwrap().coefficients(30).unwrap();
        let h = ez2.log_coefficients().unwrap();
        assert!((h.coeff(12) - 6.0).abs() < 1e-12);
        assert!((h.coeff(1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_and_fg_entries() {
        let y2 = from_key("zeta_y:2").unwrap().coefficients(40).unwrap();
        let fg = from_key("fg:2").unwrap().coefficients(40).unwrap();
        assert_eq!(y2.as_slice(), fg.as_slice());
        let y3 = from_key("zeta_y:3").unwrap().coefficients(40).unwrap();
        assert_eq!(y3.coeff(12), 1.0);
        assert_eq!(y3.coeff(10), 0.0);
        let f22 = from_key("fg:2^2").unwrap().coefficients(64).unwrap();
        for m in 0..=6 {
            assert_eq!(f22.coeff(1 << m), (m + 1) as f64);
        }
        assert!(from_key("fg:2,2").is_err());
        assert!(make_fg_multiplicative(&[]).is_err());
    }

    #[test]
    fn bad_keys() {
        for k in ["nope", "exp_geom", "exp_geom:x", "zeta_y:1", "exp_zeta:3"] {
            assert!(from_key(k).is_err(), "{k}");
        }
    }

    #[test]
    fn exp_zeta_pow_one_is_exp_zeta() {
        let a = from_key("exp_zeta_pow:1").unwrap();
        let b = from_key("exp_zeta").unwrap();
        let ja = a.series.real_jet_at(0.3).unwrap();
        let jb = b.series.real_jet_at(0.3).unwrap();
        assert_eq!(ja, jb);
        assert_eq!(a.coefficients(50).unwrap().as_slice(), b.coefficients(50).unwrap().as_slice());
    }

    #[test]
    fn closed_form_agrees_with_coefficients() {
        for (key, n, sigma) in [("exp_geom:2", 4096, 2.5), ("zeta_y:5", 20000, 2.5), ("fg:2^1,3^2", 4096, 2.5), ("exp_zeta_shift:1", 4096, 5.0)] {
            let e = from_key(key).unwrap();
            let c = e.coefficients(n).unwrap();
            let s = num_complex::Complex64::new(sigma, 0.0);
            let closed = e.series.eval_f(s).unwrap().value.re;
            let trunc = c.eval(s).unwrap().value.re;
            assert!((closed - trunc).abs() < 1e-6 * closed, "{key}: {closed} vs {trunc}");
        }
    }
}
