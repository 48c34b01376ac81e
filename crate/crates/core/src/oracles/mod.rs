//! Executable checkers for the deterministic inequalities behind the
//! optimizer, plus brute-force numeric oracles for the closed forms.
//!
//! Every checker is a pure function returning a [`CheckReport`]. Signed
//! violations are positive when the checked statement is broken.

mod numeric;
mod sequences;
mod trace;
mod trace_checks;

pub use numeric::{
    FD_STEP, FD_TOL, argmin_radial, bregman, check_bregman_bounds, check_hessian_sandwich, conjugate_by_maximization,
    fd_hessian,
};
pub use sequences::{check_last_average, check_sum_k, sum_k_bound, sum_k_value};
pub use trace::{StepRecord, TraceWindow};
pub use trace_checks::{
    check_diff_regularizers, check_iterate_bound, check_key_inequality, check_partial_regret,
    check_regret_identity, key_inequality_dual, key_inequality_terms, IDENTITY_TOL, INEQUALITY_TOL,
};

use std::fmt;

/// Outcome of one checker over one or more instances.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub instances: u64,
    /// Largest signed violation seen; `-inf` when no instance was tested.
    pub max_violation: f64,
    pub tolerance: f64,
    /// Description of the instance attaining `max_violation`.
    pub worst: Option<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            instances: 0,
            max_violation: f64::NEG_INFINITY,
            tolerance,
            worst: None,
        }
    }

    /// Records one instance. NaN violations count as failures.
    pub fn record(&mut self, violation: f64, payload: impl FnOnce() -> String) {
        self.instances += 1;
        let v = if violation.is_nan() { f64::INFINITY } else { violation };
        if v > self.max_violation || self.worst.is_none() {
            self.max_violation = v;
            self.worst = Some(payload());
        }
    }

    /// Folds another report of the same check into this one.
    pub fn merge(&mut self, other: CheckReport) {
        self.instances += other.instances;
        if other.max_violation > self.max_violation || self.worst.is_none() {
            self.max_violation = other.max_violation;
            self.worst = other.worst;
        }
    }

    pub fn passed(&self) -> bool {
        self.max_violation <= self.tolerance
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: instances={} max_violation={:.3e} tolerance={:.1e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.instances,
            self.max_violation,
            self.tolerance
        )?;
        if !self.passed() {
            if let Some(w) = &self.worst {
                write!(f, " worst=[{w}]")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_passes() {
        let r = CheckReport::new("x", 1e-9);
        assert!(r.passed());
        assert_eq!(r.instances, 0);
    }

    #[test]
    fn record_and_merge_track_worst() {
        let mut a = CheckReport::new("x", 1e-9);
        a.record(-1.0, || "a".into());
        a.record(-0.5, || "b".into());
        assert_eq!(a.worst.as_deref(), Some("b"));
        let mut b = CheckReport::new("x", 1e-9);
        b.record(1.0, || "c".into());
        a.merge(b);
        assert_eq!(a.instances, 3);
        assert!(!a.passed());
        assert_eq!(a.worst.as_deref(), Some("c"));
        let mut n = CheckReport::new("x", 1e-9);
        n.record(f64::NAN, || "nan".into());
        assert!(!n.passed());
    }
}
