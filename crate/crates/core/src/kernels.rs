//! Weighted Bergman kernels and the integral operators built from them.
//!
//! Every operator is evaluated pointwise: z is fixed and the w-integral is a Monte-Carlo
//! estimate from [`crate::quadrature`].

use num_complex::Complex64;

use crate::calculus::MultiIndex;
use crate::domain::{rho, DomainConfig, TubePoint};
use crate::error::{Result, TubeError};
use crate::functions::FunctionHandle;
use crate::quadrature::{integrate_tube_many, integrate_tube_with, IntegralResult, QuadratureSpec};
use crate::special::{
    forelli_rudin_single_constant, gamma_ratio, kernel_coefficient, principal_pow,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dimension, weight and the kernel normalization c_α = Γ(n+1+α)/(2^{n+1}π^nΓ(α+1)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams {
    cfg: DomainConfig,
    coefficient: f64,
}

impl KernelParams {
    pub fn new(cfg: DomainConfig) -> Self {
        Self {
            cfg,
            coefficient: kernel_coefficient(cfg.n(), cfg.alpha()),
        }
    }

    pub fn cfg(&self) -> &DomainConfig {
        &self.cfg
    }

    pub fn n(&self) -> usize {
        self.cfg.n()
    }

    pub fn alpha(&self) -> f64 {
        self.cfg.alpha()
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    /// n + 1 + α.
    pub fn exponent(&self) -> f64 {
        self.cfg.kernel_exponent()
    }
}

/// Parameters of T_{a,b,γ'} and of sampled L^p_s norm ratios.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorParams {
    pub a: f64,
    pub b: f64,
    pub gamma_prime: Vec<u32>,
    pub p: f64,
    pub s: f64,
}

impl OperatorParams {
    pub fn new(a: f64, b: f64, gamma_prime: Vec<u32>) -> Self {
        Self {
            a,
            b,
            gamma_prime,
            p: f64::INFINITY,
            s: 0.0,
        }
    }

    /// -pa < s + 1 < p(b + 1); for p = ∞ this reads a > 0 and b > -1.
    pub fn in_boundedness_window(&self) -> bool {
        if self.p.is_infinite() {
            return self.a > 0.0 && self.b > -1.0;
        }
        -self.p * self.a < self.s + 1.0 && self.s + 1.0 < self.p * (self.b + 1.0)
    }
}

/// K_α(z, w) = c_α / ρ(z, w)^{n+1+α}.
pub fn kernel(z: &TubePoint, w: &TubePoint, kp: &KernelParams) -> Result<Complex64> {
    Ok(kp.coefficient * principal_pow(rho(z, w), -kp.exponent())?)
}

/// K̃_α(z, w) = K_α(z, w) - K_α(**i**, w); identically zero at z = **i**.
pub fn modified_kernel(z: &TubePoint, w: &TubePoint, kp: &KernelParams) -> Result<Complex64> {
    let base = TubePoint::base(z.dim());
    if z.coords() == base.coords() {
        return Ok(ZERO);
    }
    Ok(kernel(z, w, kp)? - kernel(&base, w, kp)?)
}

fn kernel_or_nan(z: &TubePoint, w: &TubePoint, kp: &KernelParams) -> Complex64 {
    kernel(z, w, kp).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
}

/// P_α f(z) = ∫ K_α(z, w) f(w) dV_α(w).
pub fn project(
    f: &FunctionHandle,
    z: &TubePoint,
    kp: &KernelParams,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    z.require_interior()?;
    integrate_tube_with(|w| kernel_or_nan(z, w, kp) * f.eval(w), &kp.cfg, spec)
}

/// P̃_α f(z) = ∫ K̃_α(z, w) f(w) dV_α(w).
pub fn modified_project(
    f: &FunctionHandle,
    z: &TubePoint,
    kp: &KernelParams,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    z.require_interior()?;
    integrate_tube_with(
        |w| modified_kernel(z, w, kp).unwrap_or(Complex64::new(f64::NAN, f64::NAN)) * f.eval(w),
        &kp.cfg,
        spec,
    )
}

/// T_α f(z) = c_α ∫ ρ(w)^α / ρ(z, w)^{n+1+α} f(w) dV(w), integrated against Lebesgue measure.
pub fn t_alpha(
    f: &FunctionHandle,
    z: &TubePoint,
    kp: &KernelParams,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    z.require_interior()?;
    let lebesgue = DomainConfig::new(kp.n(), 0.0)?;
    let spec = QuadratureSpec {
        kappa: Some(spec.kappa.unwrap_or(kp.alpha())),
        ..*spec
    };
    let alpha = kp.alpha();
    integrate_tube_with(
        |w| {
            let k = principal_pow(rho(z, w), -kp.exponent())
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            kp.coefficient * w.defect().powf(alpha) * k * f.eval(w)
        },
        &lebesgue,
        &spec,
    )
}

/// B_α f(z) = ∫ f(w) |K_α(w, z)|² / K_α(z, z) dV_α(w).
pub fn berezin(
    f: &FunctionHandle,
    z: &TubePoint,
    kp: &KernelParams,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    z.require_interior()?;
    let kzz = kernel(z, z, kp)?.re;
    integrate_tube_with(
        |w| f.eval(w) * (kernel_or_nan(w, z, kp).norm_sqr() / kzz),
        &kp.cfg,
        spec,
    )
}

/// MO_α f(z) = ‖f k_z - B_α f(z) k_z‖ with k_z the normalized kernel, via B_α|f|² - |B_α f|².
pub fn berezin_oscillation(
    f: &FunctionHandle,
    z: &TubePoint,
    kp: &KernelParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    z.require_interior()?;
    let kzz = kernel(z, z, kp)?.re;
    let res = integrate_tube_many(
        2,
        |w, out| {
            let k = kernel_or_nan(w, z, kp).norm_sqr() / kzz;
            let v = f.eval(w);
            out[0] = v * k;
            out[1] = Complex64::new(v.norm_sqr() * k, 0.0);
        },
        &kp.cfg,
        spec,
    )?;
    Ok((res[1].value.re - res[0].value.norm_sqr()).max(0.0).sqrt())
}

/// H_f g(z) = f(z)g(z) - P_α(fg)(z) for holomorphic g.
pub fn hankel(
    f: &FunctionHandle,
    g: &FunctionHandle,
    z: &TubePoint,
    kp: &KernelParams,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    let proj = project(&f.mul(g), z, kp, spec)?;
    Ok(IntegralResult {
        value: f.eval(z) * g.eval(z) - proj.value,
        ..proj
    })
}

/// T_{a,b,γ'} f(z) = ρ(z)^a ∫ |(z'-w')^{γ'}| ρ(w)^b / |ρ(z,w)|^{n+1+a+b+|γ'|/2} f(w) dV_α(w).
pub fn t_general(
    f: &FunctionHandle,
    z: &TubePoint,
    op: &OperatorParams,
    cfg: &DomainConfig,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    z.require_interior()?;
    if op.gamma_prime.len() + 1 != z.dim() {
        return Err(TubeError::DimensionMismatch {
            expected: z.dim() - 1,
            found: op.gamma_prime.len(),
        });
    }
    let g_order: u32 = op.gamma_prime.iter().sum();
    let exponent = z.dim() as f64 + 1.0 + op.a + op.b + f64::from(g_order) / 2.0;
    let scale = z.defect().powf(op.a);
    let mut res = integrate_tube_with(
        |w| {
            let mono: f64 = z
                .prime()
                .iter()
                .zip(w.prime())
                .zip(&op.gamma_prime)
                .map(|((a, b), &g)| (a - b).norm().powi(g as i32))
                .product();
            let denom = rho(z, w).norm().powf(exponent);
            f.eval(w) * (scale * mono * w.defect().powf(op.b) / denom)
        },
        cfg,
        spec,
    )?;
    if !op.in_boundedness_window() && res.warning.is_none() {
        res.warning = Some(format!(
            "(p, s, a, b) = ({}, {}, {}, {}) outside the boundedness window",
            op.p, op.s, op.a, op.b
        ));
    }
    Ok(res)
}

/// Invariant gradient of z ↦ P̃_α f(z), differentiating the kernel under the integral.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionGradient {
    /// L_1, ..., L_n applied to P̃_α f at z.
    pub l_values: Vec<IntegralResult>,
    /// |∇̃ P̃_α f(z)|.
    pub norm: f64,
    /// First-order propagated standard error of `norm`.
    pub stderr: f64,
}

pub fn modified_project_gradient(
    f: &FunctionHandle,
    z: &TubePoint,
    kp: &KernelParams,
    spec: &QuadratureSpec,
) -> Result<ProjectionGradient> {
    z.require_interior()?;
    let n = z.dim();
    let big_n = kp.exponent();
    let half_i = Complex64::new(0.0, 0.5);
    let l_values = integrate_tube_many(
        n,
        |w, out| {
            let r = rho(z, w);
            let Ok(p) = principal_pow(r, -big_n - 1.0) else {
                out.iter_mut()
                    .for_each(|o| *o = Complex64::new(f64::NAN, f64::NAN));
                return;
            };
            // ∂_{z_k} K = -N c ρ^{-N-1} ∂_{z_k} ρ, ∂_{z_n} ρ = -i/2,
            // L_j ρ(·, w) = ½(z̄_j - w̄_j)
            let common = -big_n * kp.coefficient * p * f.eval(w);
            for (j, (zj, wj)) in z.prime().iter().zip(w.prime()).enumerate() {
                out[j] = common * 0.5 * (zj.conj() - wj.conj());
            }
            out[n - 1] = common * (-half_i);
        },
        &kp.cfg,
        spec,
    )?;
    let rho_z = z.defect();
    let coeffs: Vec<f64> = (0..n)
        .map(|k| {
            if k == n - 1 {
                8.0 * rho_z * rho_z
            } else {
                4.0 * rho_z
            }
        })
        .collect();
    let sq: f64 = l_values
        .iter()
        .zip(&coeffs)
        .map(|(l, a)| a * l.value.norm_sqr())
        .sum();
    let norm = sq.sqrt();
    let stderr = if norm > 0.0 {
        l_values
            .iter()
            .zip(&coeffs)
            .map(|(l, a)| (a * l.value.norm() * l.stderr / norm).powi(2))
            .sum::<f64>()
            .sqrt()
    } else {
        l_values
            .iter()
            .zip(&coeffs)
            .map(|(l, a)| a.sqrt() * l.stderr)
            .sum()
    };
    Ok(ProjectionGradient {
        l_values,
        norm,
        stderr,
    })
}

/// Explicit bound sup |∇̃ P̃_α f| ≤ C ‖f‖_∞ from ρ|L_n P̃f| ≤ c' C₁(n, n+2+α, α)‖f‖_∞ and
/// ρ^{1/2}|L_j P̃f| ≤ 2c' C₁(n, n+3/2+α, α)‖f‖_∞, c' = c_α(n+1+α)/2.
pub fn modified_projection_gradient_bound(kp: &KernelParams) -> Result<f64> {
    let n = kp.n();
    let alpha = kp.alpha();
    let c_prime = kp.coefficient * kp.exponent() / 2.0;
    let a_n = c_prime * forelli_rudin_single_constant(n, n as f64 + 2.0 + alpha, alpha)?;
    let a_j = if n > 1 {
        2.0 * c_prime * forelli_rudin_single_constant(n, n as f64 + 1.5 + alpha, alpha)?
    } else {
        0.0
    };
    Ok((8.0 * a_n * a_n + 4.0 * (n as f64 - 1.0) * a_j * a_j).sqrt())
}

/// One candidate constant of the representation f = c_N T_α(ρ^N L_n^N f).
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub label: String,
    pub constant: Complex64,
    pub predicted: Complex64,
    pub stderr: f64,
    pub agrees: bool,
}

/// Outcome of testing f = (±2i)^N Γ(1+α)/Γ(1+α+N) · T_α(ρ^N L_n^N f) at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct RepresentationReport {
    pub order: u32,
    pub target: Complex64,
    pub integral: IntegralResult,
    pub candidates: Vec<Candidate>,
    /// True when the candidate constants are numerically equal (even N).
    pub coincident: bool,
}

impl RepresentationReport {
    /// Labels of the distinct candidate values that agree with f(z).
    pub fn winners(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for c in &self.candidates {
            if c.agrees {
                out.push(c.label.as_str());
            }
            if self.coincident {
                break;
            }
        }
        out
    }
}

/// Computes T_α(ρ^N L_n^N f)(z) with the exact L_n^N oracle of f and compares f(z) against
/// both sign conventions of the constant.
pub fn representation_check(
    f: &FunctionHandle,
    z: &TubePoint,
    order: u32,
    kp: &KernelParams,
    spec: &QuadratureSpec,
    rel_tol: f64,
) -> Result<RepresentationReport> {
    z.require_interior()?;
    let n = z.dim();
    let gamma = MultiIndex::last_power(n, order);
    f.exact_l(z, &gamma)?;
    let g = {
        let f = f.clone();
        let gamma = gamma.clone();
        FunctionHandle::new("rho^N L_n^N f", move |w: &TubePoint| {
            w.defect().powi(order as i32)
                * f.exact_l(w, &gamma)
                    .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        })
    };
    let integral = t_alpha(&g, z, kp, spec)?;
    let target = f.eval(z);
    let gamma_factor = gamma_ratio(1.0 + kp.alpha(), 1.0 + kp.alpha() + f64::from(order));
    let candidates: Vec<Candidate> = [("(2i)^N", 2.0), ("(-2i)^N", -2.0)]
        .iter()
        .map(|&(label, s)| {
            let constant = Complex64::new(0.0, s).powi(order as i32) * gamma_factor;
            let predicted = constant * integral.value;
            let stderr = constant.norm() * integral.stderr;
            let agrees = (predicted - target).norm() <= (3.0 * stderr).max(rel_tol * target.norm());
            Candidate {
                label: label.to_string(),
                constant,
                predicted,
                stderr,
                agrees,
            }
        })
        .collect();
    let coincident = (candidates[0].constant - candidates[1].constant).norm()
        <= 1e-12 * candidates[0].constant.norm();
    Ok(RepresentationReport {
        order,
        target,
        integral,
        candidates,
        coincident,
    })
}

/// Truncated masses ∫_{|w|<R, ρ(w)>1/R} |g(w)| dV_α for an increasing sequence R_k, with
/// shell increments carrying their own standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationReport {
    pub truncations: Vec<f64>,
    pub values: Vec<IntegralResult>,
    /// values[k] - values[k-1], estimated directly on the shell (k ≥ 1).
    pub increments: Vec<IntegralResult>,
}

impl TruncationReport {
    pub fn is_monotone(&self) -> bool {
        self.values
            .windows(2)
            .all(|w| w[1].value.re >= w[0].value.re)
    }

    /// Every increment exceeds 3 standard errors and half the first increment.
    pub fn has_no_plateau(&self) -> bool {
        let Some(first) = self.increments.first() else {
            return false;
        };
        self.increments
            .iter()
            .all(|d| d.value.re > 3.0 * d.stderr && d.value.re >= 0.5 * first.value.re)
    }

    /// The last increment is at most a quarter of the first.
    pub fn is_cauchy(&self) -> bool {
        match (self.increments.first(), self.increments.last()) {
            (Some(a), Some(b)) => b.value.re <= 0.25 * a.value.re,
            _ => false,
        }
    }
}

fn truncation_level(w: &TubePoint, truncations: &[f64]) -> Option<usize> {
    let norm = w.coords().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    truncations
        .iter()
        .position(|&r| norm < r && w.defect() > 1.0 / r)
}

/// Truncated L¹_α masses of a kernel-like integrand g(w).
pub fn truncated_mass<G>(
    g: G,
    truncations: &[f64],
    cfg: &DomainConfig,
    spec: &QuadratureSpec,
) -> Result<TruncationReport>
where
    G: Fn(&TubePoint) -> f64 + Sync,
{
    if truncations.is_empty() || truncations.windows(2).any(|w| w[1] <= w[0]) {
        return Err(TubeError::InvalidParameter(
            "truncations must increase".into(),
        ));
    }
    let k = truncations.len();
    let res = integrate_tube_many(
        2 * k,
        |w, out| {
            if let Some(level) = truncation_level(w, truncations) {
                let v = Complex64::new(g(w), 0.0);
                out[k + level] = v;
                for o in &mut out[level..k] {
                    *o = v;
                }
            }
        },
        cfg,
        spec,
    )?;
    let values = res[..k].to_vec();
    let increments = res[k + 1..].to_vec();
    Ok(TruncationReport {
        truncations: truncations.to_vec(),
        values,
        increments,
    })
}

/// Truncated masses of |K_α(**i**, ·)|.
pub fn kernel_l1_divergence(
    kp: &KernelParams,
    truncations: &[f64],
    spec: &QuadratureSpec,
) -> Result<TruncationReport> {
    let base = TubePoint::base(kp.n());
    truncated_mass(
        |w| kernel_or_nan(&base, w, kp).norm(),
        truncations,
        &kp.cfg,
        spec,
    )
}

/// Truncated masses of |K̃_α(z, ·)|, which converge.
pub fn modified_kernel_l1(
    z: &TubePoint,
    kp: &KernelParams,
    truncations: &[f64],
    spec: &QuadratureSpec,
) -> Result<TruncationReport> {
    truncated_mass(
        |w| {
            modified_kernel(z, w, kp)
                .map(|k| k.norm())
                .unwrap_or(f64::NAN)
        },
        truncations,
        &kp.cfg,
        spec,
    )
}

/// ‖K_λ(z, ·)‖^p_{A^p_λ} = ∫ |K_λ(z, w)|^p dV_λ(w), with λ the weight of `kp`.
pub fn kernel_norm_power(
    z: &TubePoint,
    p: f64,
    kp: &KernelParams,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    z.require_interior()?;
    integrate_tube_with(
        |w| Complex64::new(kernel_or_nan(z, w, kp).norm().powf(p), 0.0),
        &kp.cfg,
        spec,
    )
}
