//! Reproducing property, Berezin transform of 1, the pointwise kernel bound and the scaling
//! of kernel norms.

use num_complex::Complex64;
use tube_core::functions::{make_bounded_symbol, make_rho_power, SymbolKind};
use tube_core::kernels::{berezin, kernel, kernel_norm_power, t_alpha, KernelParams};
use tube_core::sampling::random_tube_points;
use tube_core::{DomainConfig, Result, TubePoint};

use super::derived_seed;
use crate::check::{Check, Outcome, Tolerance};
use crate::SuiteConfig;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Five evaluation points spread over scales.
fn eval_points(n: usize) -> Vec<TubePoint> {
    let prime = vec![c(0.2, 0.1); n - 1];
    vec![
        TubePoint::base(n),
        TubePoint::on_axis(n, 0.5, 2.0),
        TubePoint::on_axis(n, -1.5, 0.3),
        TubePoint::from_parts(&prime, c(1.0, 0.8)),
        TubePoint::from_parts(&prime, c(-3.0, 5.0)),
    ]
}

pub fn checks(config: &SuiteConfig) -> Vec<Check> {
    let n = config.n_or(2);
    let alpha = config.alpha_or(0.5);
    let spec = config.quad(200_000, None);
    let seed = config.seed;
    let mut out = Vec::new();
    let big_n = n as f64 + 1.0 + alpha;
    let centers = [
        TubePoint::base(n),
        TubePoint::from_parts(&vec![c(-0.3, 0.2); n - 1], c(0.7, 1.6)),
        TubePoint::on_axis(n, -0.4, 0.6),
    ];
    for (k, (u0, m)) in centers
        .into_iter()
        .zip([big_n, big_n + 0.5, big_n + 1.0])
        .enumerate()
    {
        for (j, z) in eval_points(n).into_iter().enumerate() {
            let u0 = u0.clone();
            out.push(Check::new(
                format!("reproducing f{k} z{j} m={m}"),
                "reproducing-formula",
                move || {
                    let kp = KernelParams::new(DomainConfig::new(n, alpha)?);
                    let f = make_rho_power(&u0, m)?;
                    Ok(Outcome::estimate(f.eval(&z), &t_alpha(&f, &z, &kp, &spec)?))
                },
            ));
        }
    }
    for (j, z) in eval_points(n).into_iter().enumerate() {
        out.push(Check::new(
            format!("berezin-of-one z{j}"),
            "berezin-transform",
            move || {
                let kp = KernelParams::new(DomainConfig::new(n, alpha)?);
                let one = make_bounded_symbol(SymbolKind::Constant(c(1.0, 0.0)));
                Ok(Outcome::estimate(1.0, &berezin(&one, &z, &kp, &spec)?))
            },
        ));
    }
    out.push(Check::new(
        format!("kernel-pointwise-bound n={n}"),
        "pairing-lower-bound",
        move || {
            let kp = KernelParams::new(DomainConfig::new(n, alpha)?);
            let zs = random_tube_points(n, 10_000, derived_seed(seed, 1), 0.95)?;
            let ws = random_tube_points(n, 10_000, derived_seed(seed, 2), 0.95)?;
            let mut violations = 0;
            for (z, w) in zs.iter().zip(&ws) {
                let bound = 2f64.powf(kp.exponent()) * kernel(z, z, &kp)?.re;
                if kernel(z, w, &kp)?.norm() > bound * (1.0 + 1e-12) {
                    violations += 1;
                }
            }
            Ok(Outcome::no_violations(violations))
        },
    ));
    let lambda = config.alpha_or(0.0);
    let norm_spec = config.quad(200_000, None);
    out.push(Check::new(
        format!("kernel-norm-exponent lambda={lambda}"),
        "kernel-norm-scaling",
        move || {
            let (n, p) = (1, 2.0);
            let kp = KernelParams::new(DomainConfig::new(n, lambda)?);
            let pts: Vec<(f64, f64)> = [0.25f64, 1.0, 4.0]
                .iter()
                .map(|&y| {
                    Ok((
                        y.ln(),
                        kernel_norm_power(&TubePoint::on_axis(n, 0.3, y), p, &kp, &norm_spec)?
                            .value
                            .re
                            .ln(),
                    ))
                })
                .collect::<Result<_>>()?;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / 3.0;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / 3.0;
            let slope = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
                / pts.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
            let expected = (1.0 - p) * (n as f64 + 1.0 + lambda);
            Ok(Outcome::equal(expected, slope, Tolerance::Relative(0.1))
                .with_provenance("monte-carlo"))
        },
    ));
    out
}
