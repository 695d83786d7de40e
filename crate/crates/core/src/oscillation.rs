//! Ball means, mean oscillation, the oscillation ω_r, BMO/Bloch semi-norm estimates and the
//! decomposition f = f̂_r + (f - f̂_r).
//!
//! All ball statistics reuse one weighted sample of D(z, r) per point, drawn with the seed of
//! the supplied spec. Per-point values therefore do not depend on which grid they are part
//! of, and grid maxima over nested grids are monotone.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::ball::beta;
use crate::calculus::invariant_gradient_norm;
use crate::domain::{DomainConfig, TubePoint};
use crate::error::{Result, TubeError};
use crate::functions::FunctionHandle;
use crate::quadrature::{ball_weighted_samples, QuadratureSpec, WeightedSample};

/// Metric radius, exponent and the grid over which suprema are taken.
#[derive(Clone, Debug, PartialEq)]
pub struct OscillationParams {
    r: f64,
    p: f64,
    grid: Vec<TubePoint>,
}

impl OscillationParams {
    pub fn new(r: f64, p: f64, grid: Vec<TubePoint>) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(TubeError::InvalidParameter(format!(
                "radius {r} must be positive"
            )));
        }
        if !(p >= 1.0) {
            return Err(TubeError::InvalidParameter(format!(
                "exponent {p} must be at least 1"
            )));
        }
        if grid.is_empty() {
            return Err(TubeError::InvalidParameter("empty grid".into()));
        }
        if let Some(z) = grid.iter().find(|z| !z.is_interior()) {
            return Err(TubeError::NotInterior { defect: z.defect() });
        }
        Ok(Self { r, p, grid })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn grid(&self) -> &[TubePoint] {
        &self.grid
    }

    pub fn with_r(&self, r: f64) -> Result<Self> {
        Self::new(r, self.p, self.grid.clone())
    }

    pub fn with_grid(&self, grid: Vec<TubePoint>) -> Result<Self> {
        Self::new(self.r, self.p, grid)
    }
}

/// A weighted sample of D(z, r) with f evaluated on it.
struct BallValues {
    sample: WeightedSample,
    values: Vec<Complex64>,
}

impl BallValues {
    fn draw(
        f: &FunctionHandle,
        z: &TubePoint,
        r: f64,
        cfg: &DomainConfig,
        spec: &QuadratureSpec,
    ) -> Result<Self> {
        let sample = ball_weighted_samples(z, r, cfg, spec)?;
        let values = sample.points.iter().map(|w| f.eval(w)).collect();
        Ok(Self { sample, values })
    }

    fn mean(&self) -> (Complex64, f64) {
        self.sample.weighted_mean(&self.values)
    }

    /// (Σ w |f - λ|^p / Σ w)^{1/p}.
    fn p_mean_about(&self, center: Complex64, p: f64) -> f64 {
        let total = self.sample.total_weight();
        let s: f64 = self
            .values
            .iter()
            .zip(&self.sample.weights)
            .map(|(v, w)| w * (v - center).norm().powf(p))
            .sum();
        (s / total).powf(1.0 / p)
    }
}

/// f̂_r(z), the dV_α-mean of f over D(z, r), with its standard error.
pub fn ball_mean_with_error(
    f: &FunctionHandle,
    z: &TubePoint,
    op: &OscillationParams,
    cfg: &DomainConfig,
    spec: &QuadratureSpec,
) -> Result<(Complex64, f64)> {
    Ok(BallValues::draw(f, z, op.r, cfg, spec)?.mean())
}

pub fn ball_mean(
    f: &FunctionHandle,
    z: &TubePoint,
    op: &OscillationParams,
    cfg: &DomainConfig,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    Ok(ball_mean_with_error(f, z, op, cfg, spec)?.0)
}

/// MO_r(f)(z) = (mean over D(z,r) of |f - f̂_r(z)|^p)^{1/p}.
pub fn mean_oscillation(
    f: &FunctionHandle,
    z: &TubePoint,
    op: &OscillationParams,
    cfg: &DomainConfig,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let bv = BallValues::draw(f, z, op.r, cfg, spec)?;
    Ok(bv.p_mean_about(bv.mean().0, op.p))
}

/// The p-mean of |f - λ| over D(z, r) for a fixed center λ, on the same sample as
/// [`mean_oscillation`].
pub fn mean_oscillation_about(
    f: &FunctionHandle,
    z: &TubePoint,
    center: Complex64,
    op: &OscillationParams,
    cfg: &DomainConfig,
    spec: &QuadratureSpec,
) -> Result<f64> {
    Ok(BallValues::draw(f, z, op.r, cfg, spec)?.p_mean_about(center, op.p))
}

/// (MO_r(f)(z), p-mean of |f - f(z)|), both from one sample.
pub fn center_comparison(
    f: &FunctionHandle,
    z: &TubePoint,
    op: &OscillationParams,
    cfg: &DomainConfig,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let bv = BallValues::draw(f, z, op.r, cfg, spec)?;
    Ok((
        bv.p_mean_about(bv.mean().0, op.p),
        bv.p_mean_about(f.eval(z), op.p),
    ))
}

/// ω_r(f)(z) estimated as max |f(z) - f(w)| over the ball sample; a lower bound.
pub fn oscillation_sup(
    f: &FunctionHandle,
    z: &TubePoint,
    op: &OscillationParams,
    cfg: &DomainConfig,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let bv = BallValues::draw(f, z, op.r, cfg, spec)?;
    let fz = f.eval(z);
    Ok(bv
        .values
        .iter()
        .map(|v| (v - fz).norm())
        .fold(0.0, f64::max))
}

/// MO_r(f) at every grid point, in grid order.
pub fn mean_oscillation_profile(
    f: &FunctionHandle,
    op: &OscillationParams,
    cfg: &DomainConfig,
    spec: &QuadratureSpec,
) -> Result<Vec<f64>> {
    op.grid
        .par_iter()
        .map(|z| mean_oscillation(f, z, op, cfg, spec))
        .collect()
}

/// ‖f‖_{BMO^p_r} estimated as the grid maximum of MO_r(f).
pub fn bmo_seminorm(
    f: &FunctionHandle,
    op: &OscillationParams,
    cfg: &DomainConfig,
    spec: &QuadratureSpec,
) -> Result<f64> {
    Ok(mean_oscillation_profile(f, op, cfg, spec)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// ‖f‖_B estimated as the grid maximum of |∇̃f|.
pub fn bloch_seminorm(f: &FunctionHandle, grid: &[TubePoint]) -> Result<f64> {
    if !f.is_holomorphic() {
        return Err(TubeError::InvalidParameter(format!(
            "{} is not holomorphic",
            f.label()
        )));
    }
    let norms: Vec<f64> = grid
        .par_iter()
        .map(|z| invariant_gradient_norm(f, z))
        .collect::<Result<_>>()?;
    Ok(norms.into_iter().fold(0.0, f64::max))
}

/// f₁ = f̂_r and f₂ = f - f₁. Each evaluation of f₁ is a seeded ball integral.
pub fn bmo_decompose(
    f: &FunctionHandle,
    op: &OscillationParams,
    cfg: &DomainConfig,
    spec: &QuadratureSpec,
) -> (FunctionHandle, FunctionHandle) {
    let (g, r, cfg, spec) = (f.clone(), op.r, *cfg, *spec);
    let f1 = FunctionHandle::new(format!("mean_r {}", f.label()), move |z: &TubePoint| {
        BallValues::draw(&g, z, r, &cfg, &spec)
            .map(|bv| bv.mean().0)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    });
    let f2 = f.sub(&f1);
    (f1, f2)
}

/// sup over the grid of sampled ω_r(f₁): the bounded-oscillation witness.
pub fn bo_witness(
    f1: &FunctionHandle,
    op: &OscillationParams,
    cfg: &DomainConfig,
    probe: &QuadratureSpec,
) -> Result<f64> {
    let values: Vec<f64> = op
        .grid
        .par_iter()
        .map(|z| oscillation_sup(f1, z, op, cfg, probe))
        .collect::<Result<_>>()?;
    Ok(values.into_iter().fold(0.0, f64::max))
}

/// Per-grid-point ball means of |f₂|^p; their supremum is the bounded-averages witness.
pub fn ba_profile(
    f2: &FunctionHandle,
    op: &OscillationParams,
    cfg: &DomainConfig,
    probe: &QuadratureSpec,
) -> Result<Vec<f64>> {
    let p = op.p;
    let pow = FunctionHandle::new("|f2|^p", {
        let f2 = f2.clone();
        move |z: &TubePoint| Complex64::new(f2.eval(z).norm().powf(p), 0.0)
    });
    op.grid
        .par_iter()
        .map(|z| ball_mean(&pow, z, op, cfg, probe).map(|m| m.re))
        .collect()
}

pub fn ba_witness(
    f2: &FunctionHandle,
    op: &OscillationParams,
    cfg: &DomainConfig,
    probe: &QuadratureSpec,
) -> Result<f64> {
    Ok(ba_profile(f2, op, cfg, probe)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// Per-grid-point sampled ω_r(f₁).
pub fn bo_profile(
    f1: &FunctionHandle,
    op: &OscillationParams,
    cfg: &DomainConfig,
    probe: &QuadratureSpec,
) -> Result<Vec<f64>> {
    op.grid
        .par_iter()
        .map(|z| oscillation_sup(f1, z, op, cfg, probe))
        .collect()
}

/// MO_r along (0', i·10^{-k}) and (0', 10^k + i), k = 0..=4. Diagnostic only.
#[derive(Clone, Debug, PartialEq)]
pub struct VmoTrend {
    pub toward_boundary: Vec<(f64, f64)>,
    pub toward_infinity: Vec<(f64, f64)>,
}

impl VmoTrend {
    /// Whether the last value of both sequences is below `eps`.
    pub fn vanishes(&self, eps: f64) -> bool {
        [&self.toward_boundary, &self.toward_infinity]
            .iter()
            .all(|s| s.last().is_some_and(|&(_, v)| v < eps))
    }
}

pub fn vmo_trend(
    f: &FunctionHandle,
    op: &OscillationParams,
    cfg: &DomainConfig,
    spec: &QuadratureSpec,
) -> Result<VmoTrend> {
    let n = cfg.n();
    let run = |points: Vec<(f64, TubePoint)>| -> Result<Vec<(f64, f64)>> {
        points
            .into_iter()
            .map(|(t, z)| Ok((t, mean_oscillation(f, &z, op, cfg, spec)?)))
            .collect()
    };
    let toward_boundary = run((0..=4)
        .map(|k| {
            let y = 10f64.powi(-k);
            (y, TubePoint::on_axis(n, 0.0, y))
        })
        .collect())?;
    let toward_infinity = run((0..=4)
        .map(|k| {
            let x = 10f64.powi(k);
            (x, TubePoint::on_axis(n, x, 1.0))
        })
        .collect())?;
    Ok(VmoTrend {
        toward_boundary,
        toward_infinity,
    })
}

/// Pairs (z, w) with |f(z) - f(w)| > bound·β(z, w)/√2 + slack.
pub fn lipschitz_violations(
    f: &FunctionHandle,
    pairs: &[(TubePoint, TubePoint)],
    bound: f64,
    slack: f64,
) -> Result<usize> {
    let mut count = 0;
    for (z, w) in pairs {
        let lhs = (f.eval(z) - f.eval(w)).norm();
        if lhs > bound * beta(z, w)? / std::f64::consts::SQRT_2 + slack {
            count += 1;
        }
    }
    Ok(count)
}
