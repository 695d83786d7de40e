use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

use tubeverify::{
    emit_report, run_suite, Format, SuiteConfig, VerifyError, DEFAULT_REL_TOL, DEFAULT_SEED,
};

/// Run one verification suite and emit a JSON or CSV report.
#[derive(Parser, Debug)]
#[command(name = "tubeverify", version)]
struct Args {
    /// identities, jacobians, forelli-rudin, metric, gradient-laplacian, kernels, representation,
    /// oscillation, decomposition or divergence
    suite: String,
    /// Complex dimension, 1..=8; suites that sweep n run only this one.
    #[arg(long)]
    n: Option<usize>,
    /// Weight exponent, > -1.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Monte-Carlo samples per integral.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, env = "TUBEVERIFY_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Importance-sampling exponent of the ball density (1 - |xi|^2)^kappa, > -1.
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// Relative floor of the statistical tolerance max(3 stderr, rel_tol |expected|).
    #[arg(long, default_value_t = DEFAULT_REL_TOL)]
    rel_tol: f64,
    /// Worker threads for independent checks.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// json or csv.
    #[arg(long, default_value = "json")]
    format: Format,
}

impl From<Args> for SuiteConfig {
    fn from(a: Args) -> Self {
        SuiteConfig {
            suite: a.suite,
            n: a.n,
            alpha: a.alpha,
            samples: a.samples,
            seed: a.seed,
            kappa: a.kappa,
            rel_tol: a.rel_tol,
            jobs: a.jobs,
            out: a.out,
            format: a.format,
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let config = SuiteConfig::from(args);
    let result = run_suite(&config).and_then(|report| {
        emit_report(&report, config.format, config.out.as_deref())?;
        Ok(report)
    });
    match result {
        Ok(report) => {
            for c in report.failures() {
                eprintln!(
                    "FAIL {}: observed {:?}, expected {:?}",
                    c.id, c.observed, c.expected
                );
            }
            if report.all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e @ VerifyError::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
