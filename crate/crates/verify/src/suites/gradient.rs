//! Invariant gradient and Laplacian identities.

use num_complex::Complex64;
use tube_core::ball::{cayley, tau, BallPoint};
use tube_core::calculus::{invariant_gradient_norm, invariant_laplacian, MultiIndex};
use tube_core::functions::{make_log_rho, make_rho_power, FunctionHandle};
use tube_core::oscillation::{ball_mean, OscillationParams};
use tube_core::sampling::random_tube_points;
use tube_core::{DomainConfig, QuadratureSpec, Result, TubePoint};

use super::derived_seed;
use crate::check::{max_of, Check, Outcome, Tolerance};
use crate::SuiteConfig;

const SAMPLES: usize = 50;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// ρ-powers around off-axis centers and a logarithm.
fn test_functions(n: usize) -> Result<Vec<FunctionHandle>> {
    let mut prime = vec![c(0.3, 0.2); n - 1];
    let u1 = TubePoint::from_parts(&prime, c(0.5, 1.5));
    prime.iter_mut().for_each(|p| *p = c(-0.4, 0.1));
    let u2 = TubePoint::from_parts(&prime, c(-1.0, 0.8));
    Ok(vec![
        make_rho_power(&u1, 2.0)?,
        make_rho_power(&u2, 1.5)?,
        make_log_rho(&u1)?,
    ])
}

/// ∂(f∘Φ)/∂ξ_k at ξ = 0 by fourth-order central differences.
fn ball_gradient_at_origin(f: &FunctionHandle, n: usize) -> Result<Vec<Complex64>> {
    let eval = |k: usize, t: f64| -> Result<Complex64> {
        let mut xi = vec![c(0.0, 0.0); n];
        xi[k] = c(t, 0.0);
        Ok(f.eval(&cayley(&BallPoint::new(xi)?)?))
    };
    let h = 1e-3;
    (0..n)
        .map(|k| {
            let d1 = (eval(k, h)? - eval(k, -h)?) / (2.0 * h);
            let d2 = (eval(k, 2.0 * h)? - eval(k, -2.0 * h)?) / (4.0 * h);
            Ok((4.0 * d1 - d2) / 3.0)
        })
        .collect()
}

fn pts(n: usize, seed: u64, stream: u64) -> Result<Vec<TubePoint>> {
    random_tube_points(n, SAMPLES, derived_seed(seed, 20 * n as u64 + stream), 0.8)
}

pub fn checks(config: &SuiteConfig) -> Vec<Check> {
    let seed = config.seed;
    let mut out = Vec::new();
    for n in config.dims_or(&[1, 2, 3]) {
        out.push(Check::new(
            format!("ball-gradient n={n}"),
            "invariant-gradient-at-base",
            move || {
                let errs: Vec<f64> = test_functions(n)?
                    .iter()
                    .map(|f| {
                        let lhs = invariant_gradient_norm(f, &TubePoint::base(n))?;
                        let g = ball_gradient_at_origin(f, n)?;
                        let rhs = std::f64::consts::SQRT_2
                            * g.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                        Ok((lhs - rhs).abs() / rhs)
                    })
                    .collect::<Result<_>>()?;
                Ok(Outcome::equal(0.0, max_of(errs), Tolerance::Absolute(1e-6))
                    .with_provenance("finite-difference"))
            },
        ));
        out.push(Check::new(
            format!("laplacian-invariance n={n}"),
            "invariant-laplacian-invariance",
            move || {
                let zs = pts(n, seed, 0)?;
                let vs = pts(n, seed, 1)?;
                let fs = test_functions(n)?;
                let mut errs = Vec::new();
                for (i, (z, v)) in zs.iter().zip(&vs).enumerate() {
                    // non-holomorphic test functions |f|²
                    let g = fs[i % 2].abs_sq();
                    let v = v.clone();
                    let composed = g.compose("g o tau_v", move |u: &TubePoint| tau(&v, u), false);
                    let lhs = invariant_laplacian(&composed, z)?;
                    let rhs = invariant_laplacian(&g, &tau(&vs[i], z)?)?;
                    errs.push((lhs - rhs).norm() / rhs.norm().max(1e-300));
                }
                Ok(Outcome::equal(0.0, max_of(errs), Tolerance::Absolute(1e-4))
                    .with_provenance("finite-difference"))
            },
        ));
        out.push(Check::new(
            format!("laplacian-of-modulus-squared n={n}"),
            "invariant-laplacian-modulus",
            move || {
                let fs = test_functions(n)?;
                let mut errs = Vec::new();
                for (i, z) in pts(n, seed, 2)?.iter().enumerate() {
                    let f = &fs[i % fs.len()];
                    let lap = invariant_laplacian(&f.abs_sq(), z)?;
                    let grad = invariant_gradient_norm(f, z)?;
                    errs.push((lap - 2.0 * grad * grad).norm() / (2.0 * grad * grad));
                }
                Ok(Outcome::equal(0.0, max_of(errs), Tolerance::Absolute(1e-4))
                    .with_provenance("finite-difference"))
            },
        ));
        out.push(Check::new(
            format!("laplacian-of-holomorphic n={n}"),
            "invariant-laplacian-holomorphic",
            move || {
                let fs = test_functions(n)?;
                let mut errs = Vec::new();
                for (i, z) in pts(n, seed, 3)?.iter().enumerate() {
                    let f = &fs[i % fs.len()];
                    let lap = invariant_laplacian(f, z)?;
                    errs.push(
                        lap.norm()
                            / f.eval(z)
                                .norm()
                                .max(invariant_gradient_norm(f, z)?)
                                .max(1.0),
                    );
                }
                Ok(Outcome::equal(0.0, max_of(errs), Tolerance::Absolute(1e-6))
                    .with_provenance("finite-difference")
                    .with_note("|laplacian f| relative to max(1, |f|, |grad f|)"))
            },
        ));
        out.push(Check::new(
            format!("gradient-from-l-operators n={n}"),
            "invariant-gradient-l-form",
            move || {
                let fs = test_functions(n)?;
                let mut errs = Vec::new();
                for (i, z) in pts(n, seed, 4)?.iter().enumerate() {
                    let f = &fs[i % fs.len()];
                    let rho = z.defect();
                    let ln = f.exact_l(z, &MultiIndex::unit(n, n - 1))?;
                    let lj: f64 = (0..n - 1)
                        .map(|j| f.exact_l(z, &MultiIndex::unit(n, j)).map(|v| v.norm_sqr()))
                        .sum::<Result<f64>>()?;
                    let from_l = (4.0 * rho * (2.0 * rho * ln.norm_sqr() + lj)).sqrt();
                    let direct = invariant_gradient_norm(f, z)?;
                    errs.push((from_l - direct).abs() / direct);
                }
                Ok(Outcome::equal(0.0, max_of(errs), Tolerance::Absolute(1e-6))
                    .with_provenance("identity"))
            },
        ));
    }
    let n = config.dims_or(&[1, 2, 3])[0];
    let samples = config.samples_or(2000);
    out.push(Check::new(
        format!("gradient-by-ball-average n={n}"),
        "gradient-sub-mean-value",
        move || {
            // sup |∇̃f(z)|² / (mean of |f|² over D(z,1)) on 100 (f, z), at two sample sizes
            let cfg = DomainConfig::new(n, 0.0)?;
            let fs = test_functions(n)?;
            let zs = random_tube_points(n, 100, derived_seed(seed, 20 * n as u64 + 6), 0.8)?;
            let op = OscillationParams::new(1.0, 2.0, vec![TubePoint::base(n)])?;
            let sup_ratio = |samples: usize| -> Result<f64> {
                let spec = QuadratureSpec::new(samples, seed);
                let ratios: Vec<f64> = zs
                    .iter()
                    .enumerate()
                    .map(|(i, z)| {
                        let f = &fs[i % fs.len()];
                        let mean = ball_mean(&f.abs_sq(), z, &op, &cfg, &spec)?.re;
                        Ok(invariant_gradient_norm(f, z)?.powi(2) / mean)
                    })
                    .collect::<Result<_>>()?;
                Ok(max_of(ratios))
            };
            let coarse = sup_ratio(samples)?;
            let fine = sup_ratio(4 * samples)?;
            Ok(Outcome::diagnostic(coarse, fine).with_note(format!(
                "empirical constant {fine:.4e} at {} samples, {coarse:.4e} at {samples}",
                4 * samples
            )))
        },
    ));
    out
}
