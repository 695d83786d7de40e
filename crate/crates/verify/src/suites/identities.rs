//! Exact algebraic identities of the Cayley transform and the pairing ρ.

use num_complex::Complex64;
use tube_core::ball::{cayley, cayley_inv, inner};
use tube_core::sampling::random_tube_points;
use tube_core::{rho, Result, TubePoint};

use super::derived_seed;
use crate::check::{max_of, Check, Outcome, Tolerance};
use crate::SuiteConfig;

const PAIRS: usize = 10_000;
const TOL: f64 = 1e-10;

fn pairs(n: usize, seed: u64) -> Result<(Vec<TubePoint>, Vec<TubePoint>)> {
    Ok((
        random_tube_points(n, PAIRS, derived_seed(seed, 2 * n as u64), 0.95)?,
        random_tube_points(n, PAIRS, derived_seed(seed, 2 * n as u64 + 1), 0.95)?,
    ))
}

fn scaled(err: Complex64, scale: Complex64) -> f64 {
    err.norm() / scale.norm().max(1.0)
}

pub fn checks(config: &SuiteConfig) -> Vec<Check> {
    let seed = config.seed;
    let mut out = Vec::new();
    for n in config.dims_or(&[1, 2, 3]) {
        out.push(Check::new(
            format!("defect-identity n={n}"),
            "cayley-inverse-defect",
            move || {
                let (zs, _) = pairs(n, seed)?;
                let base = TubePoint::base(n);
                let errs = zs.iter().map(|z| {
                    let xi = cayley_inv(z)?;
                    let defect = 1.0 - xi.coords().iter().map(|c| c.norm_sqr()).sum::<f64>();
                    let last = 1.0 + xi.last() - rho(z, &base).inv();
                    Ok((defect - z.defect() / rho(z, &base).norm_sqr())
                        .abs()
                        .max(last.norm()))
                });
                let errs: Vec<f64> = errs.collect::<Result<_>>()?;
                Ok(Outcome::equal(0.0, max_of(errs), Tolerance::Absolute(TOL))
                    .with_provenance("identity"))
            },
        ));
        out.push(Check::new(
            format!("inner-product-identity n={n}"),
            "cayley-inverse-pairing",
            move || {
                let (zs, ws) = pairs(n, seed)?;
                let base = TubePoint::base(n);
                let errs: Vec<f64> = zs
                    .iter()
                    .zip(&ws)
                    .map(|(z, w)| {
                        let lhs = 1.0 - inner(cayley_inv(z)?.coords(), cayley_inv(w)?.coords());
                        let rhs = rho(z, w) / (rho(z, &base) * rho(&base, w));
                        Ok(scaled(lhs - rhs, rhs))
                    })
                    .collect::<Result<_>>()?;
                Ok(Outcome::equal(0.0, max_of(errs), Tolerance::Absolute(TOL))
                    .with_provenance("identity"))
            },
        ));
        out.push(Check::new(
            format!("pairing-identity n={n}"),
            "cayley-forward-pairing",
            move || {
                let (zs, ws) = pairs(n, seed)?;
                let errs: Vec<f64> = zs
                    .iter()
                    .zip(&ws)
                    .map(|(z, w)| {
                        let (xi, eta) = (cayley_inv(z)?, cayley_inv(w)?);
                        let lhs = rho(&cayley(&xi)?, &cayley(&eta)?);
                        let rhs = (1.0 - inner(xi.coords(), eta.coords()))
                            / ((1.0 + xi.last()) * (1.0 + eta.last().conj()));
                        Ok(scaled(lhs - rhs, rhs))
                    })
                    .collect::<Result<_>>()?;
                Ok(Outcome::equal(0.0, max_of(errs), Tolerance::Absolute(TOL))
                    .with_provenance("identity")
                    .with_note("error relative to max(1, |rhs|)"))
            },
        ));
        out.push(Check::new(
            format!("round-trip n={n}"),
            "cayley-round-trip",
            move || {
                let (zs, _) = pairs(n, seed)?;
                let errs: Vec<f64> = zs
                    .iter()
                    .map(|z| {
                        let back = cayley(&cayley_inv(z)?)?;
                        let d: f64 = back
                            .coords()
                            .iter()
                            .zip(z.coords())
                            .map(|(a, b)| (a - b).norm_sqr())
                            .sum();
                        let s: f64 = z.coords().iter().map(|c| c.norm_sqr()).sum();
                        Ok(d.sqrt() / s.sqrt().max(1.0))
                    })
                    .collect::<Result<_>>()?;
                Ok(Outcome::equal(0.0, max_of(errs), Tolerance::Absolute(TOL))
                    .with_provenance("identity")
                    .with_note("error relative to max(1, |z|)"))
            },
        ));
    }
    out
}
