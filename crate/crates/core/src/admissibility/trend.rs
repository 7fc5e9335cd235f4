use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    PassTrend,
    FailTrend,
    Inconclusive,
}

/// What a condition asks of its quantity as `sigma -> alpha+`. Values are log10 magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Goal {
    ToZero,
    ToInfinity,
    /// Quantity stays `<= 1` (log10 `<= tolerance`).
    AtMostOne,
    /// `liminf > 0`.
    PositiveLiminf,
}

/// Number of trailing grid points the rule looks at.
pub const TAIL: usize = 5;

/// Slack on log10 values for the `AtMostOne` rule.
pub const AT_MOST_ONE_SLACK: f64 = 5e-10;

fn tail(values: &[Option<f64>]) -> Option<Vec<f64>> {
    if values.len() < TAIL {
        return None;
    }
    values[values.len() - TAIL..].iter().copied().collect()
}

fn first_finite(values: &[Option<f64>]) -> Option<f64> {
    values.iter().flatten().copied().find(|v| v.is_finite())
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn non_decreasing_moving(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0]) && v[v.len() - 1] > v[0]
}

fn non_increasing_moving(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0]) && v[v.len() - 1] < v[0]
}

/// Apply the finite trend rule to a series of log10 values ordered toward `alpha`.
pub fn judge(goal: Goal, values: &[Option<f64>]) -> Verdict {
    let Some(t) = tail(values) else { return Verdict::Inconclusive };
    if t.iter().any(|v| v.is_nan()) {
        return Verdict::Inconclusive;
    }
    let last = t[TAIL - 1];
    match goal {
        Goal::ToZero => {
            let first = first_finite(values).unwrap_or(f64::NAN);
            if strictly_decreasing(&t) && last < first - 1.0 {
                Verdict::PassTrend
            } else if non_decreasing_moving(&t) {
                Verdict::FailTrend
            } else {
                Verdict::Inconclusive
            }
        }
        Goal::ToInfinity => {
            let first = first_finite(values).unwrap_or(f64::NAN);
            if strictly_increasing(&t) && last > first + 1.0 {
                Verdict::PassTrend
            } else if non_increasing_moving(&t) {
                Verdict::FailTrend
            } else {
                Verdict::Inconclusive
            }
        }
        Goal::AtMostOne => {
            if t.iter().all(|v| *v <= AT_MOST_ONE_SLACK) {
                Verdict::PassTrend
            } else if t.iter().all(|v| *v > AT_MOST_ONE_SLACK) {
                Verdict::FailTrend
            } else {
                Verdict::Inconclusive
            }
        }
        Goal::PositiveLiminf => {
            let first = first_finite(values).unwrap_or(f64::NAN);
            if t.contains(&f64::NEG_INFINITY) || (strictly_decreasing(&t) && last < first - 1.0) {
                Verdict::FailTrend
            } else {
                Verdict::PassTrend
            }
        }
    }
}

/// Combine verdicts of alternatives that must all hold: any FAIL fails, all PASS passes.
pub fn all_of(vs: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut all_pass = true;
    for v in vs {
        match v {
            Verdict::FailTrend => return Verdict::FailTrend,
            Verdict::Inconclusive => all_pass = false,
            Verdict::PassTrend => {}
        }
    }
    if all_pass {
        Verdict::PassTrend
    } else {
        Verdict::Inconclusive
    }
}
