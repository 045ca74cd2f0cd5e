use serde::Serialize;
use serde_json::Value;

/// Outcome of one verification check.
///
/// `gate` checks decide the exit status; non-gate checks are reported data
/// (literal-form comparisons, advisory signed checks, constants).
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    pub samples: Vec<Value>,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub gate: bool,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(check_id: impl Into<String>, tol: f64) -> Self {
        CheckReport {
            check_id: check_id.into(),
            samples: Vec::new(),
            max_abs_residual: 0.0,
            max_rel_residual: 0.0,
            tol,
            pass: true,
            gate: true,
            notes: Vec::new(),
        }
    }

    pub fn info(mut self) -> Self {
        self.gate = false;
        self
    }

    /// Record one residual; relative residual drives pass/fail.
    pub fn record(&mut self, abs: f64, rel: f64) {
        let abs = if abs.is_nan() { f64::INFINITY } else { abs };
        let rel = if rel.is_nan() { f64::INFINITY } else { rel };
        self.max_abs_residual = self.max_abs_residual.max(abs);
        self.max_rel_residual = self.max_rel_residual.max(rel);
        self.pass = self.max_rel_residual < self.tol;
    }

    pub fn record_rel(&mut self, rel: f64) {
        self.record(rel, rel);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn fail(&mut self, why: impl Into<String>) {
        self.record(f64::INFINITY, f64::INFINITY);
        self.note(why);
    }

    pub fn merge(&mut self, other: &CheckReport) {
        self.record(other.max_abs_residual, other.max_rel_residual);
        self.samples.extend(other.samples.iter().cloned());
        self.notes.extend(other.notes.iter().cloned());
    }
}

/// `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_err(a: crate::C, b: crate::C) -> f64 {
    let d = (a - b).norm();
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        d
    } else {
        d / s
    }
}
