use super::trend::{judge, Goal, Verdict};
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;

fn finite_or_null<S: Serializer>(v: &[Option<f64>], s: S) -> Result<S::Ok, S::Error> {
    let mapped: Vec<Option<f64>> = v.iter().map(|x| x.filter(|y| y.is_finite())).collect();
    mapped.serialize(s)
}

/// One condition's log10 values along the grid and its verdict.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionSeries {
    pub goal: Goal,
    #[serde(rename = "values", serialize_with = "finite_or_null")]
    pub log10_values: Vec<Option<f64>>,
    pub verdict: Verdict,
}

impl ConditionSeries {
    pub fn judged(goal: Goal, log10_values: Vec<Option<f64>>) -> Self {
        let verdict = judge(goal, &log10_values);
        ConditionSeries { goal, log10_values, verdict }
    }
}

/// Per-condition trend series and verdicts over a sigma-grid.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub label: String,
    pub alpha: f64,
    /// sigma values (decreasing to alpha)
    pub grid: Vec<f64>,
    /// sigma - alpha, exact even where sigma rounds to alpha
    pub offsets: Vec<f64>,
    /// values are log10 magnitudes
    pub scale: &'static str,
    pub conditions: BTreeMap<String, ConditionSeries>,
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn new(label: &str, alpha: f64, offsets: &[f64]) -> Self {
        ConditionReport {
            label: label.to_string(),
            alpha,
            grid: offsets.iter().map(|e| alpha + e).collect(),
            offsets: offsets.to_vec(),
            scale: "log10",
            conditions: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn insert(&mut self, name: &str, goal: Goal, values: Vec<Option<f64>>) {
        self.conditions.insert(name.to_string(), ConditionSeries::judged(goal, values));
    }

    pub fn verdict(&self, name: &str) -> Option<Verdict> {
        self.conditions.get(name).map(|c| c.verdict)
    }

    /// True when every listed condition passed.
    pub fn all_pass(&self) -> bool {
        self.conditions.values().all(|c| c.verdict == Verdict::PassTrend)
    }
}
