use serde::{Deserialize, Serialize};

use crate::num::Scalar;
use crate::problem::{DelayReport, ObjectiveKind, Solution};

/// Best-so-far value after a number of objective evaluations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CurvePoint<T = f64> {
    pub evaluations: u64,
    pub best: T,
}

/// Outcome of one solver run on one scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SolverReport<T = f64> {
    pub solver: String,
    pub kind: ObjectiveKind,
    pub solution: Solution,
    pub objective: T,
    pub delays: DelayReport<T>,
    pub evaluations: u64,
    /// GA only.
    pub generations: Option<u64>,
    pub wall_time_s: f64,
    pub curve: Vec<CurvePoint<T>>,
}

impl<T: Scalar> SolverReport<T> {
    pub fn to_json(&self) -> crate::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Appends a point when `best` improves on the last recorded value.
pub(crate) fn record_improvement<T: Scalar>(curve: &mut Vec<CurvePoint<T>>, evaluations: u64, best: T) {
    match curve.last() {
        Some(p) if p.best <= best => {}
        _ => curve.push(CurvePoint { evaluations, best }),
    }
}

/// Closes a curve at the final evaluation count.
pub(crate) fn close_curve<T: Scalar>(curve: &mut Vec<CurvePoint<T>>, evaluations: u64) {
    if let Some(&last) = curve.last() {
        if last.evaluations != evaluations {
            curve.push(CurvePoint {
                evaluations,
                best: last.best,
            });
        }
    }
}
