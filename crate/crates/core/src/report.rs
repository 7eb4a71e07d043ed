use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::quat::GroupPoint;

/// The point a check was evaluated at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportPoint {
    Group(GroupPoint),
    /// A vector in `C^4` as `[re, im]` pairs.
    Complex(Vec<[f64; 2]>),
}

impl From<GroupPoint> for ReportPoint {
    fn from(q: GroupPoint) -> Self {
        Self::Group(q)
    }
}

/// Named residuals of one check at one point, with a pass/fail verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    #[serde(rename = "check-name")]
    pub check_name: String,
    pub point: Option<ReportPoint>,
    pub residuals: BTreeMap<String, f64>,
    pub pass: bool,
    pub tolerance: f64,
}

impl VerificationReport {
    pub fn new(check_name: impl Into<String>, point: Option<ReportPoint>, tolerance: f64) -> Self {
        Self {
            check_name: check_name.into(),
            point,
            residuals: BTreeMap::new(),
            pass: false,
            tolerance,
        }
    }

    pub fn with_residual(mut self, name: impl Into<String>, value: f64) -> Self {
        self.residuals.insert(name.into(), value);
        self
    }

    pub fn push(&mut self, name: impl Into<String>, value: f64) {
        self.residuals.insert(name.into(), value);
    }

    /// Passes iff every residual is finite and at most the tolerance.
    pub fn judged_by_tolerance(mut self) -> Self {
        let tol = self.tolerance;
        self.pass = !self.residuals.is_empty()
            && self.residuals.values().all(|r| r.is_finite() && *r <= tol);
        self
    }

    pub fn with_pass(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals.get(name).copied()
    }

    /// Largest residual; NaN propagates as infinity.
    pub fn max_residual(&self) -> f64 {
        self.residuals
            .values()
            .map(|r| if r.is_nan() { f64::INFINITY } else { *r })
            .fold(0.0, f64::max)
    }
}
