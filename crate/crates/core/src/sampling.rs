//! Deterministic point sets for sup-estimates and seeded random test points.
//!
//! The structured grid is a Halton sequence pushed through the Cayley transform, so level
//! L+1 contains level L, plus a ladder of points (0', i·10^{k/2}) spanning eight decades of ρ.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

use crate::ball::{cayley, BallPoint};
use crate::domain::TubePoint;
use crate::error::{Result, TubeError};

const PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Points of grid level 0; each level doubles the count.
pub const BASE_GRID_SIZE: usize = 100;

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    out
}

/// Unit-norm direction in C^n ≅ R^{2n} from 2n uniforms via Box–Muller.
fn direction_from_uniforms(u: &[f64]) -> Vec<Complex64> {
    let normals: Vec<f64> = u
        .chunks(2)
        .flat_map(|p| {
            let r = (-2.0 * p[0].max(1e-300).ln()).sqrt();
            let t = 2.0 * PI * p[1];
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    let norm = normals.iter().map(|x| x * x).sum::<f64>().sqrt();
    normals
        .chunks(2)
        .map(|p| Complex64::new(p[0] / norm, p[1] / norm))
        .collect()
}

fn ball_to_tube(dir: &[Complex64], radius: f64) -> Result<TubePoint> {
    let coords: Vec<Complex64> = dir.iter().map(|d| d * radius).collect();
    cayley(&BallPoint::with_defect(coords, 1.0 - radius * radius)?)
}

/// (0', i·10^{k/2}) for k = -4..=4.
pub fn rho_ladder(n: usize) -> Vec<TubePoint> {
    (-4..=4)
        .map(|k| TubePoint::on_axis(n, 0.0, 10f64.powf(f64::from(k) / 2.0)))
        .collect()
}

/// The nested Halton grid of `level` (100·2^level points, |ξ| ≤ 0.999), followed by the ρ-ladder.
pub fn structured_grid(n: usize, level: u32) -> Result<Vec<TubePoint>> {
    if n == 0 {
        return Err(TubeError::ZeroDimension);
    }
    if 2 * n + 1 > PRIMES.len() {
        return Err(TubeError::InvalidParameter(format!(
            "grid dimension n = {n} too large"
        )));
    }
    let count = BASE_GRID_SIZE << level;
    let mut out = Vec::with_capacity(count + 9);
    let mut index = 1u64;
    while out.len() < count {
        let u: Vec<f64> = PRIMES[..2 * n + 1]
            .iter()
            .map(|&b| radical_inverse(index, b))
            .collect();
        index += 1;
        let radius = 1.0 - 10f64.powf(-3.0 * u[2 * n]);
        // a Halton point can land on the Cayley pole ξ = (0', -1) only up to rounding
        if let Ok(z) = ball_to_tube(&direction_from_uniforms(&u[..2 * n]), radius) {
            out.push(z);
        }
    }
    out.extend(rho_ladder(n));
    Ok(out)
}

/// `count` seeded points Φ(ξ) with ξ uniform in the ball of radius `max_radius` < 1.
pub fn random_tube_points(
    n: usize,
    count: usize,
    seed: u64,
    max_radius: f64,
) -> Result<Vec<TubePoint>> {
    if n == 0 {
        return Err(TubeError::ZeroDimension);
    }
    if !(max_radius > 0.0 && max_radius < 1.0) {
        return Err(TubeError::InvalidParameter(format!(
            "max_radius {max_radius} outside (0, 1)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let raw: Vec<f64> = (0..2 * n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let dir: Vec<Complex64> = raw
            .chunks(2)
            .map(|p| Complex64::new(p[0] / norm, p[1] / norm))
            .collect();
        let radius = max_radius * rng.random::<f64>().powf(1.0 / (2 * n) as f64);
        if let Ok(z) = ball_to_tube(&dir, radius) {
            out.push(z);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_values() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn grid_sizes_and_nesting() {
        let g0 = structured_grid(2, 0).unwrap();
        let g2 = structured_grid(2, 2).unwrap();
        assert_eq!(g0.len(), 109);
        assert_eq!(g2.len(), 409);
        assert_eq!(&g0[..100], &g2[..100]);
        assert!(g2.iter().all(TubePoint::is_interior));
    }

    #[test]
    fn grid_spans_scales() {
        let g = structured_grid(1, 1).unwrap();
        let (lo, hi) = g.iter().fold((f64::MAX, 0.0f64), |(a, b), z| {
            (a.min(z.defect()), b.max(z.defect()))
        });
        assert!(lo <= 0.01 && hi >= 100.0, "{lo} {hi}");
    }

    #[test]
    fn random_points_are_seeded() {
        let a = random_tube_points(3, 50, 9, 0.95).unwrap();
        let b = random_tube_points(3, 50, 9, 0.95).unwrap();
        let c = random_tube_points(3, 50, 10, 0.95).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.iter().all(TubePoint::is_interior));
        assert!(random_tube_points(1, 1, 0, 1.0).is_err());
    }
}
