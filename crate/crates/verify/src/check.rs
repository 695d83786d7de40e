//! Checks as deferred computations, and their evaluation into reports.

use rayon::prelude::*;
use std::time::Instant;
use tube_core::{IntegralResult, TubeError};

use crate::report::{CheckReport, Comparison, Value};

/// How the tolerance of a check is derived.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tolerance {
    /// max(3·stderr, rel_tol·|expected|).
    Statistical,
    Absolute(f64),
    /// A multiple of |expected|.
    Relative(f64),
}

/// The result of running one check, before judging.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub expected: Value,
    pub provenance: &'static str,
    pub observed: Value,
    pub stderr: f64,
    pub tolerance: Tolerance,
    pub comparison: Comparison,
    pub note: Option<String>,
}

impl Outcome {
    pub fn equal(
        expected: impl Into<Value>,
        observed: impl Into<Value>,
        tolerance: Tolerance,
    ) -> Self {
        Self {
            expected: expected.into(),
            provenance: "closed-form",
            observed: observed.into(),
            stderr: 0.0,
            tolerance,
            comparison: Comparison::Equal,
            note: None,
        }
    }

    /// Statistical comparison of a Monte-Carlo estimate.
    pub fn estimate(expected: impl Into<Value>, r: &IntegralResult) -> Self {
        Self {
            provenance: "monte-carlo",
            note: r.warning.clone(),
            ..Self::equal(expected, r.value, Tolerance::Statistical).with_stderr(r.stderr)
        }
    }

    pub fn at_most(
        bound: impl Into<Value>,
        observed: impl Into<Value>,
        tolerance: Tolerance,
    ) -> Self {
        Self {
            comparison: Comparison::AtMost,
            provenance: "bound",
            ..Self::equal(bound, observed, tolerance)
        }
    }

    /// A count of violations that must be zero.
    pub fn no_violations(count: usize) -> Self {
        Self {
            provenance: "bound",
            ..Self::equal(0.0, count as f64, Tolerance::Absolute(0.0))
        }
    }

    pub fn diagnostic(expected: impl Into<Value>, observed: impl Into<Value>) -> Self {
        Self {
            comparison: Comparison::Diagnostic,
            provenance: "diagnostic",
            ..Self::equal(expected, observed, Tolerance::Absolute(0.0))
        }
    }

    pub fn with_stderr(mut self, stderr: f64) -> Self {
        self.stderr = stderr;
        self
    }

    pub fn with_provenance(mut self, provenance: &'static str) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    fn tol(&self, rel_tol: f64) -> f64 {
        match self.tolerance {
            Tolerance::Statistical => (3.0 * self.stderr).max(rel_tol * self.expected.abs()),
            Tolerance::Absolute(a) => a,
            Tolerance::Relative(r) => r * self.expected.abs(),
        }
    }

    fn passes(&self, tol: f64) -> bool {
        if !self.observed.is_finite() {
            return false;
        }
        match self.comparison {
            Comparison::Equal => self.observed.distance(&self.expected) <= tol,
            Comparison::AtMost => self.observed.re() <= self.expected.re() + tol,
            Comparison::Diagnostic => true,
        }
    }
}

type Body = Box<dyn Fn() -> Result<Outcome, TubeError> + Send + Sync>;

/// A named, deferred check.
pub struct Check {
    pub id: String,
    pub anchor: &'static str,
    body: Body,
}

impl Check {
    pub fn new<F>(id: impl Into<String>, anchor: &'static str, body: F) -> Self
    where
        F: Fn() -> Result<Outcome, TubeError> + Send + Sync + 'static,
    {
        Self {
            id: id.into(),
            anchor,
            body: Box::new(body),
        }
    }

    /// Runs the body; a module error becomes a failed report carrying the message.
    pub fn evaluate(&self, rel_tol: f64) -> CheckReport {
        let start = Instant::now();
        let result = (self.body)();
        let seconds = start.elapsed().as_secs_f64();
        match result {
            Ok(o) => {
                let tol = o.tol(rel_tol);
                CheckReport {
                    id: self.id.clone(),
                    anchor: self.anchor.to_string(),
                    expected: o.expected,
                    provenance: o.provenance.to_string(),
                    observed: o.observed,
                    stderr: o.stderr,
                    tol,
                    pass: o.passes(tol),
                    seconds,
                    comparison: o.comparison,
                    note: o.note,
                }
            }
            Err(e) => CheckReport {
                id: self.id.clone(),
                anchor: self.anchor.to_string(),
                expected: Value::Real(f64::NAN),
                provenance: "error".into(),
                observed: Value::Real(f64::NAN),
                stderr: f64::NAN,
                tol: f64::NAN,
                pass: false,
                seconds,
                comparison: Comparison::Equal,
                note: Some(e.to_string()),
            },
        }
    }
}

/// Evaluates checks in order, or on `jobs` threads with the report order preserved.
pub fn run_checks(checks: &[Check], rel_tol: f64, jobs: usize) -> Vec<CheckReport> {
    if jobs <= 1 {
        return checks.iter().map(|c| c.evaluate(rel_tol)).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| checks.par_iter().map(|c| c.evaluate(rel_tol)).collect()),
        Err(_) => checks.iter().map(|c| c.evaluate(rel_tol)).collect(),
    }
}

/// Largest element, NaN-propagating so that a NaN fails downstream comparisons.
pub fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc, x| {
        if x.is_nan() || acc.is_nan() {
            f64::NAN
        } else {
            acc.max(x)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistical_tolerance() {
        let o = Outcome::equal(10.0, 10.15, Tolerance::Statistical).with_stderr(0.01);
        let r = Check::new("x", "a", move || Ok(o.clone())).evaluate(0.02);
        assert_eq!(r.tol, 0.2);
        assert!(r.pass);
        let o = Outcome::equal(10.0, 10.5, Tolerance::Statistical).with_stderr(0.1);
        assert!(
            !Check::new("x", "a", move || Ok(o.clone()))
                .evaluate(0.02)
                .pass
        );
    }

    #[test]
    fn errors_become_failures() {
        let r = Check::new("x", "a", || Err(TubeError::ZeroDimension)).evaluate(0.02);
        assert!(!r.pass);
        assert!(r.note.unwrap().contains("dimension"));
    }

    #[test]
    fn nan_never_passes() {
        let o = Outcome::at_most(1.0, f64::NAN, Tolerance::Absolute(1.0));
        assert!(
            !Check::new("x", "a", move || Ok(o.clone()))
                .evaluate(0.02)
                .pass
        );
        assert!(max_of([1.0, f64::NAN, 2.0]).is_nan());
    }

    #[test]
    fn parallel_order_is_stable() {
        let checks: Vec<Check> = (0..20)
            .map(|i| {
                Check::new(format!("c{i}"), "a", move || {
                    Ok(Outcome::equal(i as f64, i as f64, Tolerance::Absolute(0.0)))
                })
            })
            .collect();
        let a = run_checks(&checks, 0.02, 1);
        let b = run_checks(&checks, 0.02, 4);
        let ids = |v: &[CheckReport]| v.iter().map(|c| c.id.clone()).collect::<Vec<_>>();
        assert_eq!(ids(&a), ids(&b));
    }
}
