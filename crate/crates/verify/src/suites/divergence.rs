//! The kernel is not integrable while the modified kernel is, and the modified projection of a
//! bounded symbol has bounded invariant gradient.

use num_complex::Complex64;
use rayon::prelude::*;
use tube_core::functions::{make_bounded_symbol, SymbolKind};
use tube_core::kernels::{
    kernel_l1_divergence, modified_kernel_l1, modified_project, modified_project_gradient,
    modified_projection_gradient_bound, KernelParams,
};
use tube_core::sampling::random_tube_points;
use tube_core::{DomainConfig, Result, TubePoint};

use super::derived_seed;
use crate::check::{Check, Outcome};
use crate::SuiteConfig;

const TRUNCATIONS: [f64; 6] = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0];

fn symbols() -> [(&'static str, SymbolKind); 2] {
    [
        ("phase", SymbolKind::Phase),
        ("smoothstep", SymbolKind::Smoothstep),
    ]
}

pub fn checks(config: &SuiteConfig) -> Vec<Check> {
    let n = config.n_or(1);
    let alpha = config.alpha_or(0.0);
    let mass_spec = config.quad(400_000, Some(alpha - 0.5));
    let grad_spec = config.quad(20_000, Some(alpha - 0.5));
    let seed = config.seed;
    let kp =
        move || -> Result<KernelParams> { Ok(KernelParams::new(DomainConfig::new(n, alpha)?)) };
    let mut out = Vec::new();
    out.push(Check::new(
        "kernel-mass-increases",
        "kernel-not-integrable",
        move || {
            let r = kernel_l1_divergence(&kp()?, &TRUNCATIONS, &mass_spec)?;
            let drops = r
                .values
                .windows(2)
                .filter(|w| w[1].value.re <= w[0].value.re)
                .count();
            let note = format!(
                "masses: {}",
                r.values
                    .iter()
                    .map(|v| format!("{:.4e}", v.value.re))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            Ok(Outcome::no_violations(drops)
                .with_provenance("monte-carlo")
                .with_note(note))
        },
    ));
    out.push(Check::new(
        "kernel-mass-has-no-plateau",
        "kernel-not-integrable",
        move || {
            let r = kernel_l1_divergence(&kp()?, &TRUNCATIONS, &mass_spec)?;
            let first = r.increments[0].value.re;
            let stalls = r
                .increments
                .iter()
                .filter(|d| !(d.value.re > 3.0 * d.stderr && d.value.re >= 0.5 * first))
                .count();
            let note = format!(
                "shell increments: {}",
                r.increments
                    .iter()
                    .map(|d| format!("{:.4e}±{:.1e}", d.value.re, d.stderr))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            Ok(Outcome::no_violations(stalls)
                .with_provenance("monte-carlo")
                .with_note(note))
        },
    ));
    out.push(Check::new(
        "modified-kernel-mass-settles",
        "modified-kernel-integrable",
        move || {
            let z = TubePoint::on_axis(n, 0.5, 2.0);
            let r = modified_kernel_l1(&z, &kp()?, &TRUNCATIONS, &mass_spec)?;
            let first = &r.increments[0];
            let last = &r.increments[r.increments.len() - 1];
            let ratio = last.value.re / first.value.re;
            let stderr = ratio
                * ((last.stderr / last.value.re).powi(2) + (first.stderr / first.value.re).powi(2))
                    .sqrt();
            Ok(
                Outcome::at_most(0.25, ratio, crate::check::Tolerance::Absolute(0.0))
                    .with_stderr(stderr)
                    .with_provenance("monte-carlo")
                    .with_note("last over first shell increment of |modified kernel|"),
            )
        },
    ));
    for (label, kind) in symbols() {
        let k2 = kind.clone();
        out.push(Check::new(
            format!("modified-projection-at-base {label}"),
            "modified-projection",
            move || {
                let f = make_bounded_symbol(kind.clone());
                Ok(Outcome::estimate(
                    Complex64::new(0.0, 0.0),
                    &modified_project(&f, &TubePoint::base(n), &kp()?, &grad_spec)?,
                ))
            },
        ));
        out.push(Check::new(
            format!("modified-projection-gradient-bound {label}"),
            "bounded-projection",
            move || {
                let kp = kp()?;
                let f = make_bounded_symbol(k2.clone());
                let bound = modified_projection_gradient_bound(&kp)?;
                let zs = random_tube_points(n, 50, derived_seed(seed, 7), 0.9)?;
                let grads: Vec<_> = zs
                    .par_iter()
                    .map(|z| modified_project_gradient(&f, z, &kp, &grad_spec))
                    .collect::<Result<_>>()?;
                let violations = grads
                    .iter()
                    .filter(|g| g.norm - 3.0 * g.stderr > bound)
                    .count();
                let worst = grads.iter().map(|g| g.norm / bound).fold(0.0, f64::max);
                Ok(Outcome::no_violations(violations)
                    .with_provenance("monte-carlo")
                    .with_note(format!(
                        "bound {bound:.4e}; max sampled |grad| / bound = {worst:.4}"
                    )))
            },
        ));
    }
    out
}
