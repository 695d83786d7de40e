//! Real Jacobians of Φ and Φ⁻¹ by finite differences, and the complex Jacobian of σ_z.

use num_complex::Complex64;
use tube_core::ball::{cayley, cayley_inv, cayley_jacobian, sigma, BallPoint, Direction};
use tube_core::calculus::{
    complex_determinant, determinant, fd_complex_jacobian, fd_real_jacobian,
};
use tube_core::sampling::random_tube_points;
use tube_core::{rho, Result, TubePoint};

use super::derived_seed;
use crate::check::{max_of, Check, Outcome, Tolerance};
use crate::SuiteConfig;

const POINTS: usize = 100;
const TOL: f64 = 1e-6;

fn points(n: usize, seed: u64, stream: u64) -> Result<Vec<TubePoint>> {
    random_tube_points(n, POINTS, derived_seed(seed, 10 * n as u64 + stream), 0.9)
}

fn forward(xi: &[Complex64]) -> Result<Vec<Complex64>> {
    Ok(cayley(&BallPoint::new(xi.to_vec())?)?.coords().to_vec())
}

fn inverse(z: &[Complex64]) -> Result<Vec<Complex64>> {
    Ok(cayley_inv(&TubePoint::new(z.to_vec())?)?.coords().to_vec())
}

/// Finite-difference real Jacobian of Φ⁻¹ at z.
fn inverse_fd(z: &TubePoint) -> Result<f64> {
    let scale = rho(z, &TubePoint::base(z.dim())).norm().min(z.defect());
    Ok(determinant(&fd_real_jacobian(
        inverse,
        z.coords(),
        1e-5 * scale,
    )?))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn checks(config: &SuiteConfig) -> Vec<Check> {
    let seed = config.seed;
    let mut out = Vec::new();
    for n in config.dims_or(&[1, 2, 3]) {
        out.push(Check::new(
            format!("forward-jacobian n={n}"),
            "cayley-real-jacobian",
            move || {
                let errs: Vec<f64> = points(n, seed, 0)?
                    .iter()
                    .map(|z| {
                        let xi = cayley_inv(z)?;
                        let h = 1e-5 * (1.0 + xi.last()).norm().min(1.0);
                        let fd = determinant(&fd_real_jacobian(forward, xi.coords(), h)?);
                        Ok(rel(fd, cayley_jacobian(Direction::Forward, xi.coords())?))
                    })
                    .collect::<Result<_>>()?;
                Ok(Outcome::equal(0.0, max_of(errs), Tolerance::Absolute(TOL))
                    .with_provenance("finite-difference")
                    .with_note("max relative error over 100 points"))
            },
        ));
        out.push(Check::new(
            format!("inverse-jacobian n={n}"),
            "cayley-inverse-real-jacobian",
            move || {
                let errs: Vec<f64> = points(n, seed, 1)?
                    .iter()
                    .map(|z| {
                        Ok(rel(
                            inverse_fd(z)?,
                            cayley_jacobian(Direction::Inverse, z.coords())?,
                        ))
                    })
                    .collect::<Result<_>>()?;
                Ok(Outcome::equal(0.0, max_of(errs), Tolerance::Absolute(TOL))
                    .with_provenance("finite-difference")
                    .with_note("max relative error of 1/(2^{n+1}|rho(z,i)|^{2(n+1)})"))
            },
        ));
        let printed = |z: &TubePoint| {
            1.0 / (4.0
                * rho(z, &TubePoint::base(z.dim()))
                    .norm()
                    .powi(2 * (z.dim() as i32 + 1)))
        };
        if n == 1 {
            out.push(Check::new(
                "inverse-jacobian-printed-form n=1",
                "cayley-inverse-real-jacobian",
                move || {
                    let errs: Vec<f64> = points(1, seed, 1)?
                        .iter()
                        .map(|z| Ok(rel(inverse_fd(z)?, printed(z))))
                        .collect::<Result<_>>()?;
                    Ok(Outcome::equal(0.0, max_of(errs), Tolerance::Absolute(TOL))
                        .with_provenance("finite-difference"))
                },
            ));
        } else {
            out.push(Check::new(
                format!("inverse-jacobian-printed-ratio n={n}"),
                "cayley-inverse-real-jacobian",
                move || {
                    let z = &points(n, seed, 1)?[0];
                    Ok(
                        Outcome::diagnostic(2f64.powi(n as i32 - 1), printed(z) / inverse_fd(z)?)
                            .with_note(
                            "ratio of 1/(4|rho(z,i)|^{2(n+1)}) to the finite-difference Jacobian",
                        ),
                    )
                },
            ));
        }
        out.push(Check::new(
            format!("sigma-complex-jacobian n={n}"),
            "sigma-jacobian",
            move || {
                let zs = points(n, seed, 2)?;
                let us = points(n, seed, 3)?;
                let errs: Vec<f64> = zs
                    .iter()
                    .zip(&us)
                    .map(|(z, u)| {
                        let map = |c: &[Complex64]| {
                            Ok(sigma(z, &TubePoint::new(c.to_vec())?)?.coords().to_vec())
                        };
                        let det = complex_determinant(&fd_complex_jacobian(
                            map,
                            u.coords(),
                            1e-4 * u.defect().min(1.0),
                        )?);
                        let expected = z.defect().powf(-(n as f64 + 1.0) / 2.0);
                        Ok((det - expected).norm() / expected)
                    })
                    .collect::<Result<_>>()?;
                Ok(Outcome::equal(0.0, max_of(errs), Tolerance::Absolute(TOL))
                    .with_provenance("finite-difference"))
            },
        ));
    }
    out
}
