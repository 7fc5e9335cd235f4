//! Numerical audit of the admissibility conditions over sigma-grids approaching the abscissa.
//!
//! Every condition quantity is stored as a log10 magnitude and judged by the
//! finite trend rule in [`trend`]. Verdicts describe trends on the sampled grid,
//! never proofs.

pub mod integrals;
pub mod report;
pub mod trend;
pub mod witness;

pub use report::{ConditionReport, ConditionSeries};
pub use trend::{Goal, Verdict};
pub use witness::{
    bc_power_delta, default_delta, min_witness, select_beta_offset, tenenbaum_witness, Grid, OffsetFn, Witness,
    WitnessSource, DELTA_CAP,
};

use crate::error::{Error, Result};
use crate::series::{dirichlet_mul, ClosedFormSeries, ProductForm, Series};
use integrals::{off_axis_mass, off_axis_perron_mass, scan_points, sup_ratio_log};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::LN_10;

/// x-panel standing in for "uniformly in x > 0".
pub const X_PANEL: [f64; 5] = [2.0, 10.0, 1e2, 1e3, 1e4];
/// Exponents r for the pole-growth test `(sigma-alpha)^r F(sigma) -> inf`.
pub const POLE_EXPONENTS: [u32; 7] = [1, 2, 5, 10, 20, 50, 100];
/// Largest height scanned pointwise in the sup-type conditions.
pub const T_SCAN: f64 = 4096.0;

pub const A_CONDITIONS: [&str; 5] = ["A4", "A5", "A6", "A7", "A8"];
pub const A_MINUS_CONDITIONS: [&str; 2] = ["A6-", "A8-"];
pub const T_CONDITIONS: [&str; 6] = ["T1", "T2", "T3", "T4", "T5", "T6"];
pub const POLE_GROWTH: &str = "pole_growth";

/// Overall classification of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    Admissible,
    TAdmissible,
    NotAdmissible,
    Conditional,
}

fn l10(v: f64) -> Option<f64> {
    (v >= 0.0).then(|| v.log10())
}

fn sigma_of(series: &Series, eps: f64) -> f64 {
    series.alpha() + eps
}

/// Evaluate `f` at every offset in parallel; stop the grid at the first failing point.
fn evaluate_grid<T, F>(grid: &Grid, f: F, notes: &mut Vec<String>) -> Vec<T>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync + Send,
{
    let out: Vec<Result<T>> = grid.offsets.par_iter().map(|&eps| f(eps)).collect();
    let mut kept = Vec::with_capacity(out.len());
    for (k, r) in out.into_iter().enumerate() {
        match r {
            Ok(v) => kept.push(v),
            Err(e) => {
                notes.push(format!("grid stopped at k = {k} (sigma - alpha = {:e}): {e}", grid.offsets[k]));
                break;
            }
        }
    }
    kept
}

fn check_grid(series: &Series, grid: &Grid) -> Result<()> {
    if grid.offsets.is_empty() {
        return Err(Error::Invalid("empty sigma-grid".into()));
    }
    if grid.offsets.windows(2).any(|w| !(w[1] < w[0])) || grid.offsets.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Invalid("grid offsets must be positive and strictly decreasing".into()));
    }
    if let Some(c) = series.coefficients() {
        if c.len() < 2 && series.closed_form().is_none() {
            return Err(Error::Invalid("admissibility diagnostics need a series with N >= 2".into()));
        }
    }
    Ok(())
}

fn delta_or_note(witness: &Witness, eps: f64) -> Option<f64> {
    let d = witness.delta_at(eps);
    (d > 0.0 && d < 1.0).then_some(d)
}

/// Max of `|R(sigma+it)|` over 65 equispaced `t` in `[-delta, delta]`.
pub fn max_remainder(series: &Series, eps: f64, delta: f64) -> Result<f64> {
    let mut best: f64 = 0.0;
    // |R(-t)| = |R(t)| for real coefficients, so the nonnegative half suffices
    for j in 32..=64 {
        let t = delta * (j as f64 / 32.0 - 1.0);
        best = best.max(series.remainder_at(eps, t)?.norm());
    }
    Ok(best)
}

/// (A4)-(A8) for the witness on the grid.
pub fn check_a(series: &Series, witness: &Witness, grid: &Grid) -> Result<ConditionReport> {
    check_grid(series, grid)?;
    let mut notes = Vec::new();
    let rows = evaluate_grid(
        grid,
        |eps| -> Result<([Option<f64>; 5], Option<String>)> {
            let j = series.real_jet_at(eps)?;
            let (b, sigma) = (j[2], sigma_of(series, eps));
            let a5 = l10(sigma * sigma * b);
            let Some(d) = delta_or_note(witness, eps) else {
                return Ok(([None, a5, None, None, None], Some(format!("delta undefined at sigma - alpha = {eps:e}"))));
            };
            let a6 = (b > 0.0).then(|| b.log10() - b * d * d / LN_10);
            let a7 = l10(max_remainder(series, eps, d)?);
            let m = off_axis_mass(series, eps, d)?;
            let note = (!m.converged).then(|| format!("(A8) quadrature unconverged at sigma - alpha = {eps:e}"));
            let a8 = (b > 0.0 && m.converged).then(|| (sigma * b.sqrt()).log10() + m.log10());
            Ok(([l10(d), a5, a6, a7, a8], note))
        },
        &mut notes,
    );
    let offsets = &grid.offsets[..rows.len()];
    let mut rep = ConditionReport::new(series.label(), series.alpha(), offsets);
    for (i, name) in A_CONDITIONS.iter().enumerate() {
        let goal = if *name == "A5" { Goal::ToInfinity } else { Goal::ToZero };
        rep.insert(name, goal, rows.iter().map(|r| r.0[i]).collect());
    }
    notes.extend(rows.iter().filter_map(|r| r.1.clone()));
    rep.notes = notes;
    Ok(rep)
}

/// (A6-) and (A8-) on the grid, the latter maximised over [`X_PANEL`].
pub fn check_a_minus(series: &Series, witness: &Witness, grid: &Grid) -> Result<ConditionReport> {
    check_grid(series, grid)?;
    let mut notes = Vec::new();
    let rows = evaluate_grid(
        grid,
        |eps| -> Result<([Option<f64>; 2], Option<String>)> {
            let j = series.real_jet_at(eps)?;
            let (b, sigma) = (j[2], sigma_of(series, eps));
            let Some(d) = delta_or_note(witness, eps) else {
                return Ok(([None, None], Some(format!("delta undefined at sigma - alpha = {eps:e}"))));
            };
            let a6m = l10(b * d * d);
            let m = off_axis_perron_mass(series, eps, d, &X_PANEL)?;
            let note = (!m.converged).then(|| format!("(A8-) quadrature unconverged at sigma - alpha = {eps:e}"));
            let a8m = (b > 0.0 && m.converged).then(|| (sigma * b.sqrt()).log10() + m.log10());
            Ok(([a6m, a8m], note))
        },
        &mut notes,
    );
    let mut rep = ConditionReport::new(series.label(), series.alpha(), &grid.offsets[..rows.len()]);
    rep.insert("A6-", Goal::ToInfinity, rows.iter().map(|r| r.0[0]).collect());
    rep.insert("A8-", Goal::ToZero, rows.iter().map(|r| r.0[1]).collect());
    notes.extend(rows.iter().filter_map(|r| r.1.clone()));
    rep.notes = notes;
    Ok(rep)
}

/// (T1)-(T6). (T3) and (T5) report the worst ratio over a t-scan.
pub fn check_t(series: &Series, witness: &Witness, grid: &Grid) -> Result<ConditionReport> {
    check_grid(series, grid)?;
    if witness.t.is_none() {
        return Err(Error::Invalid("T-conditions need a witness with T(sigma)".into()));
    }
    let mut notes = vec![format!("(T3)/(T5) scanned pointwise up to t = {T_SCAN}; (T3) bounded by the majorant beyond")];
    let rows = evaluate_grid(
        grid,
        |eps| -> Result<[Option<f64>; 6]> {
            let j = series.real_jet_at(eps)?;
            let (b, c, sigma) = (j[2], j[3], sigma_of(series, eps));
            let t_big = witness.t_at(eps).unwrap_or(f64::NAN);
            let t1 = l10(sigma * sigma * b);
            let t2 = (b > 0.0).then(|| 3.0 * b.log10() - 2.0 * c.abs().log10());
            let d = delta_or_note(witness, eps);
            let t3 = match d {
                Some(d) if t_big > 0.0 => {
                    let sup = sup_ratio_log(series, eps, d, t_big, T_SCAN)?;
                    Some(t_big.log10() + sup / LN_10)
                }
                _ => None,
            };
            let t4 = (b > 0.0 && t_big > 0.0).then(|| 0.5 * b.log10() - t_big.log10());
            let t5 = if c != 0.0 {
                let lo = d.unwrap_or(1e-3) / 64.0;
                let mut worst: f64 = 0.0;
                for t in scan_points(lo, T_SCAN, series.peaks(T_SCAN)) {
                    worst = worst.max(series.jet_at(eps, t)?[3].norm() / c.abs());
                }
                l10(worst)
            } else {
                None
            };
            let t6 = Some(c.abs().log10());
            Ok([t1, t2, t3, t4, t5, t6])
        },
        &mut notes,
    );
    let mut rep = ConditionReport::new(series.label(), series.alpha(), &grid.offsets[..rows.len()]);
    let goals = [Goal::ToInfinity, Goal::ToInfinity, Goal::AtMostOne, Goal::ToZero, Goal::AtMostOne, Goal::PositiveLiminf];
    for (i, name) in T_CONDITIONS.iter().enumerate() {
        rep.insert(name, goals[i], rows.iter().map(|r| r[i]).collect());
    }
    rep.notes = notes;
    Ok(rep)
}

/// Real-axis trends implied by admissibility, including the pole-growth test.
pub fn check_corollary_trends(series: &Series, grid: &Grid) -> Result<ConditionReport> {
    check_grid(series, grid)?;
    let mut notes = Vec::new();
    let rows = evaluate_grid(
        grid,
        |eps| -> Result<Vec<Option<f64>>> {
            let j = series.real_jet_at(eps)?;
            let (h, a, b, sigma) = (j[0], j[1], j[2], sigma_of(series, eps));
            let log_f = h / LN_10;
            let mut v = vec![
                (a < 0.0).then(|| (-a).log10()),
                (b > 0.0 && a != 0.0).then(|| 2.0 * a.abs().log10() - b.log10()),
                (a < 0.0).then(|| (-a).log10() + eps.log10()),
                (b > 0.0).then(|| log_f - sigma.log10() - 0.5 * b.log10()),
            ];
            for r in POLE_EXPONENTS {
                v.push(Some(r as f64 * eps.log10() + log_f));
            }
            Ok(v)
        },
        &mut notes,
    );
    let mut rep = ConditionReport::new(series.label(), series.alpha(), &grid.offsets[..rows.len()]);
    let names = ["a_to_neg_inf", "a2_over_b", "offset_times_a", "f_over_sigma_sqrt_b"];
    for (i, name) in names.iter().enumerate() {
        rep.insert(name, Goal::ToInfinity, rows.iter().map(|r| r[i]).collect());
    }
    let mut pole = Vec::new();
    for (k, r) in POLE_EXPONENTS.iter().enumerate() {
        let name = format!("{POLE_GROWTH}_r{r}");
        rep.insert(&name, Goal::ToInfinity, rows.iter().map(|row| row[4 + k]).collect());
        pole.push(rep.verdict(&name).unwrap_or(Verdict::Inconclusive));
    }
    let combined = trend::all_of(pole);
    rep.conditions.insert(
        POLE_GROWTH.to_string(),
        ConditionSeries { goal: Goal::ToInfinity, log10_values: Vec::new(), verdict: combined },
    );
    rep.notes = notes;
    Ok(rep)
}

/// Product series `F_1 F_2` with the witness `delta = min(delta_1, delta_2)`.
pub fn product(s1: &Series, w1: &Witness, s2: &Series, w2: &Witness) -> Result<(Series, Witness)> {
    if (s1.alpha() - s2.alpha()).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "factors have different abscissas {} and {}",
            s1.alpha(),
            s2.alpha()
        )));
    }
    let label = format!("{}*{}", s1.label(), s2.label());
    let coeffs = match (s1.coefficients(), s2.coefficients()) {
        (Some(a), Some(b)) => Some(dirichlet_mul(a, b).with_label(label.clone()).with_alpha(s1.alpha())),
        _ => None,
    };
    let series = match (s1.closed_form(), s2.closed_form()) {
        (Some(f1), Some(f2)) => {
            let mut c = ClosedFormSeries::new(label, s1.alpha(), std::sync::Arc::new(ProductForm(vec![f1.clone(), f2.clone()])));
            c.coefficients = coeffs;
            Series::ClosedForm(c)
        }
        _ => match coeffs {
            Some(c) => Series::Coefficients(c),
            None => return Err(Error::Invalid("product needs both factors closed-form or both coefficient-backed".into())),
        },
    };
    Ok((series, min_witness(w1, w2)))
}

/// Full diagnosis: all condition groups, derived classification, comparison to an expectation.
#[derive(Debug, Clone, Serialize)]
pub struct Diagnosis {
    pub schema: &'static str,
    pub label: String,
    pub alpha: f64,
    pub beta: f64,
    pub witness_source: WitnessSource,
    pub expected: Option<Classification>,
    pub classification: Classification,
    pub matched: bool,
    pub mismatches: Vec<String>,
    pub a: ConditionReport,
    pub a_minus: ConditionReport,
    pub t: Option<ConditionReport>,
    pub trends: ConditionReport,
}

fn verdict_of(rep: &ConditionReport, name: &str) -> Verdict {
    rep.verdict(name).unwrap_or(Verdict::Inconclusive)
}

/// Run every checker and classify.
pub fn diagnose(series: &Series, witness: &Witness, grid: &Grid, expected: Option<Classification>) -> Result<Diagnosis> {
    let a = check_a(series, witness, grid)?;
    let a_minus = check_a_minus(series, witness, grid)?;
    let t = match witness.t {
        Some(_) => Some(check_t(series, witness, grid)?),
        None => None,
    };
    let trends = check_corollary_trends(series, grid)?;
    let a_pass = A_CONDITIONS.iter().all(|n| verdict_of(&a, n) == Verdict::PassTrend);
    let t_pass = t.as_ref().is_some_and(|t| T_CONDITIONS.iter().all(|n| verdict_of(t, n) == Verdict::PassTrend));
    let pole = verdict_of(&trends, POLE_GROWTH);
    let classification = if pole == Verdict::FailTrend {
        Classification::NotAdmissible
    } else if a_pass && t_pass {
        Classification::TAdmissible
    } else if a_pass {
        Classification::Admissible
    } else {
        Classification::Conditional
    };
    let mut mismatches = Vec::new();
    match expected {
        Some(Classification::TAdmissible) => {
            for n in A_CONDITIONS {
                if verdict_of(&a, n) != Verdict::PassTrend {
                    mismatches.push(format!("{n}: expected PASS_TREND, got {:?}", verdict_of(&a, n)));
                }
            }
            match &t {
                Some(t) => {
                    for n in T_CONDITIONS {
                        if verdict_of(t, n) != Verdict::PassTrend {
                            mismatches.push(format!("{n}: expected PASS_TREND, got {:?}", verdict_of(t, n)));
                        }
                    }
                }
                None => mismatches.push("T-conditions not evaluated (witness has no T)".into()),
            }
        }
        Some(Classification::Admissible) => {
            for n in A_CONDITIONS {
                if verdict_of(&a, n) != Verdict::PassTrend {
                    mismatches.push(format!("{n}: expected PASS_TREND, got {:?}", verdict_of(&a, n)));
                }
            }
            if let Some(t) = &t {
                if verdict_of(t, "T3") != Verdict::FailTrend {
                    mismatches.push(format!("T3: expected FAIL_TREND, got {:?}", verdict_of(t, "T3")));
                }
            }
        }
        Some(Classification::NotAdmissible) => {
            if pole != Verdict::FailTrend {
                mismatches.push(format!("{POLE_GROWTH}: expected FAIL_TREND, got {pole:?}"));
            }
        }
        Some(Classification::Conditional) | None => {}
    }
    Ok(Diagnosis {
        schema: "1",
        label: series.label().to_string(),
        alpha: series.alpha(),
        beta: witness.beta(series.alpha()),
        witness_source: witness.source,
        expected,
        classification,
        matched: mismatches.is_empty(),
        mismatches,
        a,
        a_minus,
        t,
        trends,
    })
}
