//! Seeded Monte-Carlo integration over the tube and over Bergman metric balls.
//!
//! Tube integrals are pulled back through the Cayley transform: ξ is drawn in the unit ball
//! with density ∝ (1 - |ξ|²)^κ, mapped to w = Φ(ξ), and weighted by
//! ρ(w)^α · J_R Φ(ξ) / q(ξ). The radial law is |ξ|² ~ Beta(n, κ+1), and we draw
//! 1 - |ξ|² ~ Beta(κ+1, n) directly so the defect near the boundary keeps full precision.
//!
//! Samples are produced in chunks of 4096. Chunk c reads ChaCha8 stream c of the seed, so
//! the sample stream does not depend on how chunks are scheduled, and partial sums are
//! merged in chunk order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use rayon::prelude::*;
use statrs::distribution::{Beta as BetaLaw, ContinuousCDF};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

use crate::ball::{cayley_inv, cayley_raw, mobius, BallPoint};
use crate::domain::{DomainConfig, TubePoint};
use crate::error::{Result, TubeError};
use crate::functions::FunctionHandle;

const CHUNK: usize = 4096;
const STRATA: usize = 8;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Sample count, seed, importance exponent and stratification switch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub samples: usize,
    pub seed: u64,
    /// Exponent κ of the ball density (1 - |ξ|²)^κ; `None` uses the weight α.
    pub kappa: Option<f64>,
    pub stratified: bool,
}

impl QuadratureSpec {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            kappa: None,
            stratified: false,
        }
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = Some(kappa);
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn stratified(mut self, on: bool) -> Self {
        self.stratified = on;
        self
    }

    fn validate(&self, alpha: f64) -> Result<f64> {
        if self.samples < 2 {
            return Err(TubeError::InvalidParameter(format!(
                "need at least 2 samples, got {}",
                self.samples
            )));
        }
        let kappa = self.kappa.unwrap_or(alpha);
        if !(kappa > -1.0) || !kappa.is_finite() {
            return Err(TubeError::InvalidParameter(format!(
                "kappa = {kappa} must exceed -1"
            )));
        }
        Ok(kappa)
    }
}

/// Monte-Carlo estimate with its standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralResult {
    pub value: Complex64,
    pub stderr: f64,
    pub samples_used: usize,
    /// Set when the running mean looks heavy tailed or fails to settle under doubling.
    pub warning: Option<String>,
}

impl IntegralResult {
    pub fn zero(samples: usize) -> Self {
        Self {
            value: ZERO,
            stderr: 0.0,
            samples_used: samples,
            warning: None,
        }
    }
}

/// Streaming mean and sum of squared deviations of complex samples (Welford, merged by Chan).
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    count: f64,
    mean: Complex64,
    m2: f64,
    max_abs: f64,
}

impl Moments {
    fn push(&mut self, x: Complex64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += (delta.conj() * (x - self.mean)).re;
        self.max_abs = self.max_abs.max(x.norm());
    }

    fn merge(&mut self, other: &Moments) {
        if other.count == 0.0 {
            return;
        }
        if self.count == 0.0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * (other.count / total);
        self.m2 += other.m2 + delta.norm_sqr() * self.count * other.count / total;
        self.count = total;
        self.max_abs = self.max_abs.max(other.max_abs);
    }

    fn variance(&self) -> f64 {
        if self.count > 1.0 {
            self.m2 / (self.count - 1.0)
        } else {
            0.0
        }
    }
}

/// Per-component moments, split by stratum when stratified.
#[derive(Clone, Debug)]
struct Tally {
    strata: Vec<Vec<Moments>>,
}

impl Tally {
    fn new(components: usize, strata: usize) -> Self {
        Self {
            strata: vec![vec![Moments::default(); components]; strata],
        }
    }

    fn merge(&mut self, other: &Tally) {
        for (a, b) in self.strata.iter_mut().zip(&other.strata) {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
        }
    }

    /// Stratified estimate Σ_k μ_k/K with variance Σ_k var_k/(K² n_k).
    fn estimate(&self, component: usize) -> (Complex64, f64) {
        let k = self.strata.len() as f64;
        let mut mean = ZERO;
        let mut var = 0.0;
        for s in &self.strata {
            let m = &s[component];
            mean += m.mean / k;
            if m.count > 0.0 {
                var += m.variance() / (k * k * m.count);
            }
        }
        (mean, var.sqrt())
    }

    fn max_abs(&self, component: usize) -> f64 {
        self.strata
            .iter()
            .map(|s| s[component].max_abs)
            .fold(0.0, f64::max)
    }

    fn count(&self) -> f64 {
        self.strata.iter().map(|s| s[0].count).sum()
    }
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Uniform direction on the unit sphere of C^n = R^{2n}.
fn direction<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    loop {
        let g: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = g.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return g.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Draws one pullback sample: the tube point and ρ^α J / q.
struct TubeSampler {
    n: usize,
    alpha: f64,
    kappa: f64,
    beta: Beta<f64>,
    law: Option<BetaLaw>,
    ln_norm: f64,
}

impl TubeSampler {
    fn new(cfg: &DomainConfig, kappa: f64, stratified: bool) -> Result<Self> {
        let n = cfg.n();
        let a = kappa + 1.0;
        let b = n as f64;
        let beta = Beta::new(a, b).map_err(|e| TubeError::InvalidParameter(e.to_string()))?;
        let law = if stratified {
            Some(BetaLaw::new(a, b).map_err(|e| TubeError::InvalidParameter(e.to_string()))?)
        } else {
            None
        };
        // ln of Γ(n+κ+1)/(π^n Γ(κ+1))
        let ln_norm = ln_gamma(n as f64 + kappa + 1.0) - n as f64 * PI.ln() - ln_gamma(kappa + 1.0);
        Ok(Self {
            n,
            alpha: cfg.alpha(),
            kappa,
            beta,
            law,
            ln_norm,
        })
    }

    fn draw<R: Rng>(&self, rng: &mut R, stratum: Option<usize>) -> Result<(TubePoint, f64)> {
        // t = 1 - |ξ|²
        let t = match (stratum, &self.law) {
            (Some(k), Some(law)) => {
                let u: f64 = rng.random();
                let p = (k as f64 + u) / STRATA as f64;
                law.inverse_cdf(p.clamp(1e-300, 1.0 - 1e-16))
            }
            _ => self.beta.sample(rng),
        };
        let t = t.clamp(f64::MIN_POSITIVE, 1.0);
        let radius = (1.0 - t).max(0.0).sqrt();
        let xi: Vec<Complex64> = direction(rng, self.n)
            .into_iter()
            .map(|c| c * radius)
            .collect();
        let one_plus = (1.0 + xi[self.n - 1]).norm();
        let point = cayley_raw(&xi, t)?;
        let n1 = self.n as f64 + 1.0;
        // ρ(w) = t/|1+ξ_n|², J = 2^{n+1}/|1+ξ_n|^{2(n+1)}, q = t^κ e^{ln_norm}
        let ln_rho = t.ln() - 2.0 * one_plus.ln();
        let ln_jac = n1 * 2f64.ln() - 2.0 * n1 * one_plus.ln();
        let ln_weight = self.alpha * ln_rho + ln_jac - self.kappa * t.ln() - self.ln_norm;
        Ok((point, ln_weight.exp()))
    }
}

fn num_chunks(samples: usize) -> usize {
    samples.div_ceil(CHUNK)
}

/// Runs `body` on every chunk and merges the tallies in chunk order. Returns the tally of the
/// first half of the chunks alongside the full one.
fn run_chunks<F>(
    samples: usize,
    components: usize,
    strata: usize,
    body: F,
) -> Result<(Tally, Tally)>
where
    F: Fn(usize, &mut Tally) -> Result<()> + Sync,
{
    let chunks = num_chunks(samples);
    let tallies: Vec<Result<Tally>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut t = Tally::new(components, strata);
            body(c, &mut t)?;
            Ok(t)
        })
        .collect();
    let mut total = Tally::new(components, strata);
    let mut half = Tally::new(components, strata);
    for (c, t) in tallies.into_iter().enumerate() {
        let t = t?;
        total.merge(&t);
        if c < chunks.div_ceil(2) {
            half.merge(&t);
        }
    }
    Ok((half, total))
}

fn chunk_range(samples: usize, c: usize) -> std::ops::Range<usize> {
    c * CHUNK..((c + 1) * CHUNK).min(samples)
}

/// Divergence heuristics: the first half and the full mean must agree, and no single sample
/// may carry a large share of the total.
fn divergence_warning(half: &Tally, full: &Tally, component: usize) -> Option<String> {
    let (m_half, se_half) = half.estimate(component);
    let (m_full, se_full) = full.estimate(component);
    let gap = (m_full - m_half).norm();
    let band = 5.0 * (se_half * se_half + se_full * se_full).sqrt();
    if gap > band && gap > 1e-12 * m_full.norm() {
        return Some(format!(
            "running mean moved by {gap:.3e} under doubling (band {band:.3e}); integral may diverge"
        ));
    }
    let total = full.count() * m_full.norm();
    let peak = full.max_abs(component);
    if total > 0.0 && peak > 0.25 * total {
        return Some(format!(
            "a single sample carries {:.0}% of the mass; integrand may be heavy tailed",
            100.0 * peak / total
        ));
    }
    None
}

fn finish(half: &Tally, full: &Tally, samples: usize, components: usize) -> Vec<IntegralResult> {
    (0..components)
        .map(|k| {
            let (value, stderr) = full.estimate(k);
            IntegralResult {
                value,
                stderr,
                samples_used: samples,
                warning: divergence_warning(half, full, k),
            }
        })
        .collect()
}

/// Integrates several integrands over the tube against dV_α with one shared sample stream.
/// `f` writes the integrand values at a point into its output slice.
pub fn integrate_tube_many<F>(
    components: usize,
    f: F,
    cfg: &DomainConfig,
    spec: &QuadratureSpec,
) -> Result<Vec<IntegralResult>>
where
    F: Fn(&TubePoint, &mut [Complex64]) + Sync,
{
    let kappa = spec.validate(cfg.alpha())?;
    let sampler = TubeSampler::new(cfg, kappa, spec.stratified)?;
    let strata = if spec.stratified { STRATA } else { 1 };
    let (half, full) = run_chunks(spec.samples, components, strata, |c, tally| {
        let mut rng = chunk_rng(spec.seed, c);
        let mut out = vec![ZERO; components];
        for i in chunk_range(spec.samples, c) {
            let stratum = i % strata;
            let (w, weight) = sampler.draw(&mut rng, spec.stratified.then_some(stratum))?;
            out.iter_mut().for_each(|o| *o = ZERO);
            f(&w, &mut out);
            for (k, v) in out.iter().enumerate() {
                let x = v * weight;
                if !x.is_finite() {
                    return Err(TubeError::NonFinite("integrate_tube"));
                }
                tally.strata[stratum][k].push(x);
            }
        }
        Ok(())
    })?;
    Ok(finish(&half, &full, spec.samples, components))
}

/// ∫ f dV_α over the tube for a closure.
pub fn integrate_tube_with<F>(
    f: F,
    cfg: &DomainConfig,
    spec: &QuadratureSpec,
) -> Result<IntegralResult>
where
    F: Fn(&TubePoint) -> Complex64 + Sync,
{
    let mut r = integrate_tube_many(1, |w, out| out[0] = f(w), cfg, spec)?;
    Ok(r.remove(0))
}

/// ∫ f dV_α over the tube.
pub fn integrate_tube(
    f: &FunctionHandle,
    cfg: &DomainConfig,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    integrate_tube_with(|w| f.eval(w), cfg, spec)
}

/// One sample of the metric ball D(z, r): the point and its dV_α weight per unit density.
struct BallSampler {
    n: usize,
    alpha: f64,
    center: BallPoint,
    radius: f64,
    ln_volume: f64,
}

impl BallSampler {
    fn new(z: &TubePoint, r: f64, cfg: &DomainConfig) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(TubeError::InvalidParameter(format!(
                "radius r = {r} must be positive"
            )));
        }
        if z.dim() != cfg.n() {
            return Err(TubeError::DimensionMismatch {
                expected: cfg.n(),
                found: z.dim(),
            });
        }
        let center = cayley_inv(z)?;
        let n = cfg.n();
        let radius = r.tanh();
        // Euclidean volume of the radius-R ball in R^{2n}: π^n R^{2n} / n!
        let ln_volume =
            n as f64 * PI.ln() + 2.0 * n as f64 * radius.ln() - ln_gamma(n as f64 + 1.0);
        Ok(Self {
            n,
            alpha: cfg.alpha(),
            center,
            radius,
            ln_volume,
        })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> Result<(TubePoint, f64)> {
        let u: f64 = rng.random();
        let len = self.radius * u.powf(1.0 / (2 * self.n) as f64);
        let x: Vec<Complex64> = direction(rng, self.n)
            .into_iter()
            .map(|c| c * len)
            .collect();
        let x_defect = 1.0 - len * len;
        let a = &self.center;
        let (eta, eta_defect) = mobius(a.coords(), a.defect(), &x, x_defect)?;
        let denom = (1.0 - crate::ball::inner(&x, a.coords())).norm_sqr();
        let n1 = self.n as f64 + 1.0;
        let one_plus = (1.0 + eta[self.n - 1]).norm();
        let point = cayley_raw(&eta, eta_defect)?;
        let ln_jac_phi = n1 * (a.defect().ln() - denom.ln());
        let ln_jac_cayley = n1 * 2f64.ln() - 2.0 * n1 * one_plus.ln();
        let ln_rho = eta_defect.ln() - 2.0 * one_plus.ln();
        let ln_weight = self.ln_volume + ln_jac_phi + ln_jac_cayley + self.alpha * ln_rho;
        Ok((point, ln_weight.exp()))
    }
}

/// Several integrals over D(z, r) against dV_α with one shared sample stream.
pub fn integrate_ball_many<F>(
    components: usize,
    f: F,
    z: &TubePoint,
    r: f64,
    cfg: &DomainConfig,
    spec: &QuadratureSpec,
) -> Result<Vec<IntegralResult>>
where
    F: Fn(&TubePoint, &mut [Complex64]) + Sync,
{
    spec.validate(cfg.alpha())?;
    let sampler = BallSampler::new(z, r, cfg)?;
    let (half, full) = run_chunks(spec.samples, components, 1, |c, tally| {
        let mut rng = chunk_rng(spec.seed, c);
        let mut out = vec![ZERO; components];
        for _ in chunk_range(spec.samples, c) {
            let (w, weight) = sampler.draw(&mut rng)?;
            out.iter_mut().for_each(|o| *o = ZERO);
            f(&w, &mut out);
            for (k, v) in out.iter().enumerate() {
                let x = v * weight;
                if !x.is_finite() {
                    return Err(TubeError::NonFinite("integrate_ball"));
                }
                tally.strata[0][k].push(x);
            }
        }
        Ok(())
    })?;
    Ok(finish(&half, &full, spec.samples, components))
}

/// ∫_{D(z,r)} f dV_α.
pub fn integrate_ball(
    f: &FunctionHandle,
    z: &TubePoint,
    r: f64,
    cfg: &DomainConfig,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    let mut res = integrate_ball_many(1, |w, out| out[0] = f.eval(w), z, r, cfg, spec)?;
    Ok(res.remove(0))
}

/// V_α(D(z, r)).
pub fn ball_volume(
    z: &TubePoint,
    r: f64,
    cfg: &DomainConfig,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    let mut res = integrate_ball_many(
        1,
        |_, out| out[0] = Complex64::new(1.0, 0.0),
        z,
        r,
        cfg,
        spec,
    )?;
    Ok(res.remove(0))
}

/// Points of D(z, r) with their dV_α weights (per unit density), in stream order.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSample {
    pub points: Vec<TubePoint>,
    pub weights: Vec<f64>,
}

impl WeightedSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Σ w.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Weighted mean of `values` with its ratio-estimator standard error.
    pub fn weighted_mean(&self, values: &[Complex64]) -> (Complex64, f64) {
        let total = self.total_weight();
        let mean: Complex64 = values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .sum::<Complex64>()
            / total;
        let spread: f64 = values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * w * (v - mean).norm_sqr())
            .sum();
        (mean, spread.sqrt() / total)
    }
}

/// The sample stream of the ball integrators, materialized.
pub fn ball_weighted_samples(
    z: &TubePoint,
    r: f64,
    cfg: &DomainConfig,
    spec: &QuadratureSpec,
) -> Result<WeightedSample> {
    spec.validate(cfg.alpha())?;
    let sampler = BallSampler::new(z, r, cfg)?;
    let chunks: Vec<Result<Vec<(TubePoint, f64)>>> = (0..num_chunks(spec.samples))
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(spec.seed, c);
            chunk_range(spec.samples, c)
                .map(|_| sampler.draw(&mut rng))
                .collect()
        })
        .collect();
    let mut out = WeightedSample {
        points: Vec::with_capacity(spec.samples),
        weights: Vec::with_capacity(spec.samples),
    };
    for c in chunks {
        for (p, w) in c? {
            out.points.push(p);
            out.weights.push(w);
        }
    }
    Ok(out)
}

/// The points of the ball sample stream, without weights.
pub fn ball_samples(z: &TubePoint, r: f64, n_points: usize, seed: u64) -> Result<Vec<TubePoint>> {
    let cfg = DomainConfig::new(z.dim(), 0.0)?;
    Ok(
        ball_weighted_samples(z, r, &cfg, &QuadratureSpec::new(n_points.max(2), seed))?
            .points
            .into_iter()
            .take(n_points)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::beta;
    use crate::domain::rho;

    fn fr_benchmark(w: &TubePoint) -> Complex64 {
        let i = TubePoint::base(1);
        (rho(&i, w).powi(2) * rho(w, &i).powi(2)).inv()
    }

    #[test]
    fn zero_integrand() {
        let cfg = DomainConfig::new(2, 0.5).unwrap();
        let r = integrate_tube_with(
            |_| Complex64::new(0.0, 0.0),
            &cfg,
            &QuadratureSpec::new(5000, 1),
        )
        .unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
        assert_eq!(r.stderr, 0.0);
        assert_eq!(r.samples_used, 5000);
    }

    #[test]
    fn forelli_rudin_constant_integrand() {
        let cfg = DomainConfig::new(1, 0.0).unwrap();
        let r = integrate_tube_with(fr_benchmark, &cfg, &QuadratureSpec::new(20_000, 3)).unwrap();
        assert!((r.value.re - 4.0 * PI).abs() < 1e-9, "{:?}", r);
    }

    #[test]
    fn determinism_bit_for_bit() {
        let cfg = DomainConfig::new(2, 1.0).unwrap();
        let f = |w: &TubePoint| rho(w, &TubePoint::base(2)).powi(-4);
        let spec = QuadratureSpec::new(30_000, 9).with_kappa(0.3);
        let a = integrate_tube_with(f, &cfg, &spec).unwrap();
        let b = integrate_tube_with(f, &cfg, &spec).unwrap();
        assert_eq!(a, b);
        let c = integrate_tube_with(f, &cfg, &spec.with_seed(10)).unwrap();
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn stratified_agrees_with_plain() {
        let cfg = DomainConfig::new(1, 0.0).unwrap();
        let f = |w: &TubePoint| {
            let i = TubePoint::base(1);
            w.defect().powi(2) * (rho(&i, w).powi(3) * rho(w, &i).powi(4)).inv()
        };
        let plain = integrate_tube_with(f, &cfg, &QuadratureSpec::new(40_000, 5)).unwrap();
        let strat =
            integrate_tube_with(f, &cfg, &QuadratureSpec::new(40_000, 5).stratified(true)).unwrap();
        let target = 4.0 * PI / 3.0;
        assert!((plain.value.re - target).abs() < 4.0 * plain.stderr + 1e-3);
        assert!((strat.value.re - target).abs() < 4.0 * strat.stderr + 1e-3);
    }

    #[test]
    fn ball_samples_stay_in_ball() {
        let z = TubePoint::from_parts(&[Complex64::new(0.3, 0.4)], Complex64::new(-1.0, 2.0));
        for s in ball_samples(&z, 1.2, 2000, 4).unwrap() {
            assert!(beta(&z, &s).unwrap() < 1.2 + 1e-9);
        }
    }

    #[test]
    fn ball_integral_of_one_is_volume() {
        let z = TubePoint::base(1);
        let cfg = DomainConfig::new(1, 0.0).unwrap();
        let spec = QuadratureSpec::new(10_000, 2);
        let one = FunctionHandle::new("one", |_| Complex64::new(1.0, 0.0));
        let a = integrate_ball(&one, &z, 1.0, &cfg, &spec).unwrap();
        let v = ball_volume(&z, 1.0, &cfg, &spec).unwrap();
        assert_eq!(a.value, v.value);
        let ws = ball_weighted_samples(&z, 1.0, &cfg, &spec).unwrap();
        let direct = ws.total_weight() / ws.len() as f64;
        assert!((direct - v.value.re).abs() < 1e-12 * direct);
    }

    #[test]
    fn rejects_bad_spec() {
        let cfg = DomainConfig::new(1, 0.0).unwrap();
        let f = |_: &TubePoint| Complex64::new(1.0, 0.0);
        assert!(integrate_tube_with(f, &cfg, &QuadratureSpec::new(1, 0)).is_err());
        assert!(
            integrate_tube_with(f, &cfg, &QuadratureSpec::new(10, 0).with_kappa(-1.5)).is_err()
        );
        assert!(ball_volume(&TubePoint::base(1), -1.0, &cfg, &QuadratureSpec::new(10, 0)).is_err());
    }
}
