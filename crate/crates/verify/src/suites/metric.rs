//! Bergman metric properties and the scaling of metric-ball volumes.

use tube_core::ball::{beta, tau};
use tube_core::quadrature::ball_volume;
use tube_core::sampling::random_tube_points;
use tube_core::{DomainConfig, Result, TubePoint};

use super::derived_seed;
use crate::check::{max_of, Check, Outcome, Tolerance};
use crate::SuiteConfig;

const TRIPLES: usize = 1000;
const TOL: f64 = 1e-8;

fn triples(n: usize, seed: u64) -> Result<[Vec<TubePoint>; 3]> {
    let pts = |s| random_tube_points(n, TRIPLES, derived_seed(seed, 3 * n as u64 + s), 0.9);
    Ok([pts(0)?, pts(1)?, pts(2)?])
}

pub fn checks(config: &SuiteConfig) -> Vec<Check> {
    let seed = config.seed;
    let mut out = Vec::new();
    for n in config.dims_or(&[1, 2, 3]) {
        out.push(Check::new(
            format!("distance-to-self n={n}"),
            "metric-axioms",
            move || {
                let [zs, _, _] = triples(n, seed)?;
                let d: Vec<f64> = zs.iter().map(|z| beta(z, z)).collect::<Result<_>>()?;
                Ok(Outcome::equal(0.0, max_of(d), Tolerance::Absolute(TOL))
                    .with_provenance("identity"))
            },
        ));
        out.push(Check::new(
            format!("symmetry n={n}"),
            "metric-axioms",
            move || {
                let [zs, ws, _] = triples(n, seed)?;
                let d: Vec<f64> = zs
                    .iter()
                    .zip(&ws)
                    .map(|(z, w)| Ok((beta(z, w)? - beta(w, z)?).abs()))
                    .collect::<Result<_>>()?;
                Ok(Outcome::equal(0.0, max_of(d), Tolerance::Absolute(TOL))
                    .with_provenance("identity"))
            },
        ));
        out.push(Check::new(
            format!("automorphism-invariance n={n}"),
            "metric-invariance",
            move || {
                let [zs, ws, vs] = triples(n, seed)?;
                let d: Vec<f64> = zs
                    .iter()
                    .zip(&ws)
                    .zip(&vs)
                    .map(|((z, w), v)| Ok((beta(&tau(v, z)?, &tau(v, w)?)? - beta(z, w)?).abs()))
                    .collect::<Result<_>>()?;
                Ok(Outcome::equal(0.0, max_of(d), Tolerance::Absolute(TOL))
                    .with_provenance("identity"))
            },
        ));
    }
    for y in [2.0, 5.0, 10.0] {
        out.push(Check::new(
            format!("axis-distance y={y}"),
            "metric-closed-form",
            move || {
                let observed = beta(&TubePoint::base(1), &TubePoint::on_axis(1, 0.0, y))?;
                Ok(Outcome::equal(
                    0.5 * f64::ln(y),
                    observed,
                    Tolerance::Absolute(TOL),
                ))
            },
        ));
    }
    let n = config.n_or(1);
    let alpha = config.alpha_or(0.0);
    let spec = config.quad(200_000, None);
    out.push(Check::new(
        format!("ball-volume-scaling n={n}"),
        "metric-ball-volume",
        move || {
            let cfg = DomainConfig::new(n, alpha)?;
            let exponent = cfg.kernel_exponent();
            let mut ratios = Vec::new();
            let mut rel_err: f64 = 0.0;
            for k in -2..=2 {
                let z = TubePoint::on_axis(n, 0.0, 10f64.powi(k));
                let v = ball_volume(&z, 1.0, &cfg, &spec)?;
                let scale = z.defect().powf(exponent);
                ratios.push(v.value.re / scale);
                rel_err = rel_err.max(v.stderr / v.value.re);
            }
            let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
            let spread = max_of(ratios.iter().map(|r| (r / mean - 1.0).abs()));
            Ok(Outcome::at_most(0.0, spread, Tolerance::Absolute(0.05))
                .with_stderr(rel_err)
                .with_provenance("monte-carlo")
                .with_note(format!(
                    "V(D(z,1))/rho(z)^(n+1+alpha) = {mean:.6e} across rho(z) = 1e-2..1e2"
                )))
        },
    ));
    out
}
