//! Verification suites for `tube-core` and the report emitter behind the `tubeverify` CLI.

pub mod check;
pub mod error;
pub mod report;
pub mod suites;

use std::path::PathBuf;
use tube_core::QuadratureSpec;

pub use error::VerifyError;
pub use report::{emit_report, CheckReport, Format, Report, ReportConfig};

pub const SUITES: [&str; 10] = [
    "identities",
    "jacobians",
    "forelli-rudin",
    "metric",
    "gradient-laplacian",
    "kernels",
    "representation",
    "oscillation",
    "decomposition",
    "divergence",
];

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_REL_TOL: f64 = 2e-2;

/// Everything a suite run depends on. Unset options fall back to per-suite defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub suite: String,
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub kappa: Option<f64>,
    pub rel_tol: f64,
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl SuiteConfig {
    pub fn new(suite: &str) -> Self {
        Self {
            suite: suite.to_string(),
            n: None,
            alpha: None,
            samples: None,
            seed: DEFAULT_SEED,
            kappa: None,
            rel_tol: DEFAULT_REL_TOL,
            jobs: 1,
            out: None,
            format: Format::Json,
        }
    }

    /// Rejects unknown suites and out-of-range flags.
    pub fn validate(&self) -> Result<(), VerifyError> {
        let bad = |msg: String| Err(VerifyError::Config(msg));
        if !SUITES.contains(&self.suite.as_str()) {
            return bad(format!(
                "unknown suite '{}' (expected one of: {})",
                self.suite,
                SUITES.join(", ")
            ));
        }
        if let Some(n) = self.n {
            if !(1..=8).contains(&n) {
                return bad(format!("--n {n} outside 1..=8"));
            }
        }
        if let Some(a) = self.alpha {
            if !(a > -1.0 && a.is_finite()) {
                return bad(format!("--alpha {a} must exceed -1"));
            }
        }
        if let Some(s) = self.samples {
            if s < 2 {
                return bad(format!("--samples {s} must be at least 2"));
            }
        }
        if let Some(k) = self.kappa {
            if !(k > -1.0 && k.is_finite()) {
                return bad(format!("--kappa {k} must exceed -1"));
            }
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return bad(format!("--rel-tol {} must be positive", self.rel_tol));
        }
        if self.jobs == 0 {
            return bad("--jobs must be at least 1".into());
        }
        Ok(())
    }

    pub fn dims_or(&self, default: &[usize]) -> Vec<usize> {
        self.n.map_or_else(|| default.to_vec(), |n| vec![n])
    }

    pub fn n_or(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }

    pub fn alpha_or(&self, default: f64) -> f64 {
        self.alpha.unwrap_or(default)
    }

    pub fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    /// Quadrature settings with the configured seed, sample count and importance exponent.
    pub fn quad(&self, default_samples: usize, default_kappa: Option<f64>) -> QuadratureSpec {
        let spec = QuadratureSpec::new(self.samples_or(default_samples), self.seed);
        match self.kappa.or(default_kappa) {
            Some(k) => spec.with_kappa(k),
            None => spec,
        }
    }

    fn report_config(&self) -> ReportConfig {
        ReportConfig {
            n: self.n,
            alpha: self.alpha,
            samples: self.samples,
            seed: self.seed,
            kappa: self.kappa,
        }
    }
}

/// Validates the configuration, then builds and evaluates the suite's checks.
pub fn run_suite(config: &SuiteConfig) -> Result<Report, VerifyError> {
    config.validate()?;
    let checks = suites::build(config)?;
    let reports = check::run_checks(&checks, config.rel_tol, config.jobs);
    Ok(Report::new(&config.suite, config.report_config(), reports))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_config_error() {
        assert!(matches!(
            run_suite(&SuiteConfig::new("nosuch")),
            Err(VerifyError::Config(_))
        ));
    }

    #[test]
    fn flag_ranges() {
        let mut c = SuiteConfig::new("metric");
        assert!(c.validate().is_ok());
        c.alpha = Some(-1.0);
        assert!(c.validate().is_err());
        c.alpha = None;
        c.n = Some(0);
        assert!(c.validate().is_err());
        c.n = Some(2);
        c.jobs = 0;
        assert!(c.validate().is_err());
        c.jobs = 2;
        c.kappa = Some(f64::NAN);
        assert!(c.validate().is_err());
    }

    #[test]
    fn quad_uses_overrides() {
        let mut c = SuiteConfig::new("kernels");
        assert_eq!(c.quad(100, Some(0.5)).kappa, Some(0.5));
        c.kappa = Some(1.0);
        c.samples = Some(7);
        let q = c.quad(100, Some(0.5));
        assert_eq!((q.samples, q.kappa, q.seed), (7, Some(1.0), DEFAULT_SEED));
    }
}
