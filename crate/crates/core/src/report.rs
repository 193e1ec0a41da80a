use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Outcome of one verification.
///
/// `worst_violation` is signed: it is the largest observed value of
/// `required − actual` (normalized as described by each check), so a
/// negative number is slack and a positive number is a violation. The check
/// passes when `worst_violation <= tol`. `at` is the grid location (volume,
/// radius, ...) where the worst value occurred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub pass: bool,
    pub worst_violation: f64,
    pub at: f64,
    pub tol: f64,
    /// Locations where the inequality holds with equality within `tol`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub equality_at: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl VerificationReport {
    pub fn new(check: &str, tol: f64) -> Self {
        VerificationReport {
            check: check.into(),
            pass: true,
            worst_violation: f64::NEG_INFINITY,
            at: f64::NAN,
            tol,
            equality_at: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// Records `violation` at `at`, using the report's own tolerance.
    pub fn observe(&mut self, violation: f64, at: f64) {
        let tol = self.tol;
        self.observe_with(violation, at, tol);
    }

    /// Records `violation` at `at` against a location-specific tolerance.
    pub fn observe_with(&mut self, violation: f64, at: f64, tol: f64) {
        if violation > self.worst_violation || violation.is_nan() {
            self.worst_violation = violation;
            self.at = at;
        }
        if !(violation <= tol) {
            self.pass = false;
        }
    }

    pub fn mark_equality(&mut self, at: f64) {
        self.equality_at.push(at);
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    /// True when equality was detected somewhere (the rigidity flag).
    pub fn rigid(&self) -> bool {
        !self.equality_at.is_empty()
    }

    /// Folds several sub-reports into one named report.
    pub fn combine(check: &str, parts: &[VerificationReport]) -> Self {
        let tol = parts.iter().map(|p| p.tol).fold(0.0, f64::max);
        let mut out = VerificationReport::new(check, tol);
        for p in parts {
            if p.worst_violation > out.worst_violation || out.at.is_nan() {
                out.worst_violation = p.worst_violation;
                out.at = p.at;
            }
            out.pass &= p.pass;
            out.warnings.extend(p.warnings.iter().cloned());
        }
        out
    }
}
