//! One line per acceptance criterion, each backed by a full suite run at default settings.

use std::time::{Duration, Instant};
use tubeverify::{run_suite, Report, SuiteConfig};

struct Criterion {
    label: &'static str,
    suite: &'static str,
    budget_secs: u64,
    /// Check-id prefixes that must appear in the report.
    required: &'static [&'static str],
    extra: fn(&Report) -> Result<(), String>,
}

fn nothing_more(_: &Report) -> Result<(), String> {
    Ok(())
}

fn names_supported_constant(r: &Report) -> Result<(), String> {
    let note = r
        .checks
        .iter()
        .find(|c| c.id == "same-winner")
        .and_then(|c| c.note.clone())
        .ok_or("same-winner check has no note")?;
    if note.contains("(2i)^N") || note.contains("(-2i)^N") {
        Ok(())
    } else {
        Err(format!("winner not recorded: {note}"))
    }
}

const CRITERIA: [Criterion; 10] = [
    Criterion {
        label: "exact identities",
        suite: "identities",
        budget_secs: 5,
        required: &[
            "defect-identity n=1",
            "defect-identity n=3",
            "pairing-identity n=2",
            "round-trip n=3",
        ],
        extra: nothing_more,
    },
    Criterion {
        label: "jacobians",
        suite: "jacobians",
        budget_secs: 10,
        required: &[
            "forward-jacobian n=1",
            "inverse-jacobian n=3",
            "sigma-complex-jacobian n=2",
        ],
        extra: nothing_more,
    },
    Criterion {
        label: "two-point integrals",
        suite: "forelli-rudin",
        budget_secs: 30,
        required: &[
            "two-point-integral r=2 s=2 t=0",
            "two-point-integral r=3 s=4 t=2",
        ],
        extra: nothing_more,
    },
    Criterion {
        label: "invariant metric",
        suite: "metric",
        budget_secs: 60,
        required: &[
            "distance-to-self",
            "symmetry",
            "automorphism-invariance",
            "axis-distance y=10",
            "ball-volume-scaling",
        ],
        extra: nothing_more,
    },
    Criterion {
        label: "invariant gradient and laplacian",
        suite: "gradient-laplacian",
        budget_secs: 60,
        required: &[
            "ball-gradient",
            "laplacian-invariance",
            "laplacian-of-modulus-squared",
            "laplacian-of-holomorphic",
        ],
        extra: nothing_more,
    },
    Criterion {
        label: "kernels",
        suite: "kernels",
        budget_secs: 120,
        required: &[
            "reproducing f2 z4",
            "berezin-of-one",
            "kernel-pointwise-bound",
            "kernel-norm-exponent",
        ],
        extra: nothing_more,
    },
    Criterion {
        label: "derivative representation",
        suite: "representation",
        budget_secs: 120,
        required: &[
            "identity N=0",
            "single-constant N=1",
            "single-constant N=2",
            "same-winner",
            "semi-analytic N=1",
        ],
        extra: names_supported_constant,
    },
    Criterion {
        label: "mean oscillation",
        suite: "oscillation",
        budget_secs: 300,
        required: &[
            "constant-has-zero-oscillation",
            "center-robustness",
            "bloch-lipschitz",
            "bmo-bloch-ratio log rho",
        ],
        extra: nothing_more,
    },
    Criterion {
        label: "decomposition",
        suite: "decomposition",
        budget_secs: 300,
        required: &[
            "parts-sum-to-symbol smoothstep",
            "bounded-oscillation-witness phase",
            "bounded-averages-witness smoothstep",
        ],
        extra: nothing_more,
    },
    Criterion {
        label: "kernel divergence and modified projection",
        suite: "divergence",
        budget_secs: 120,
        required: &[
            "kernel-mass-increases",
            "kernel-mass-has-no-plateau",
            "modified-projection-at-base",
            "modified-projection-gradient-bound",
        ],
        extra: nothing_more,
    },
];

fn judge(c: &Criterion) -> Result<Duration, String> {
    let start = Instant::now();
    let report = run_suite(&SuiteConfig::new(c.suite)).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if let Some(missing) = c
        .required
        .iter()
        .find(|p| !report.checks.iter().any(|k| k.id.starts_with(*p)))
    {
        return Err(format!("no check named {missing}"));
    }
    let failed: Vec<&str> = report.failures().map(|k| k.id.as_str()).collect();
    if !report.all_pass || !failed.is_empty() {
        return Err(format!("failed checks: {}", failed.join(", ")));
    }
    (c.extra)(&report)?;
    if elapsed > Duration::from_secs(c.budget_secs) {
        return Err(format!(
            "took {:.1}s, budget {}s",
            elapsed.as_secs_f64(),
            c.budget_secs
        ));
    }
    Ok(elapsed)
}

fn main() {
    let mut failures = 0;
    for (k, c) in CRITERIA.iter().enumerate() {
        match judge(c) {
            Ok(t) => println!(
                "PASS {:>2} {} ({}) {:.2}s",
                k + 1,
                c.label,
                c.suite,
                t.as_secs_f64()
            ),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {} ({}): {why}", k + 1, c.label, c.suite);
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
