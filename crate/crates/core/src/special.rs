//! Gamma-function constants, Pochhammer symbols and principal complex powers.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

use crate::error::{Result, TubeError};

/// Rising factorial (a)_k = a (a+1) ... (a+k-1); (a)_0 = 1.
pub fn pochhammer(a: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (a + f64::from(j)))
}

/// Γ(a)/Γ(b) for positive arguments, evaluated in log space.
pub fn gamma_ratio(a: f64, b: f64) -> f64 {
    (ln_gamma(a) - ln_gamma(b)).exp()
}

/// Normalization c_α = Γ(n+1+α) / (2^{n+1} π^n Γ(α+1)) of the weighted Bergman kernel.
pub fn kernel_coefficient(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    (ln_gamma(nf + 1.0 + alpha) - ln_gamma(alpha + 1.0) - (nf + 1.0) * 2f64.ln() - nf * PI.ln())
        .exp()
}

/// Closed-form constant of the two-point integral
///
/// ∫ ρ(w)^t / (ρ(z,w)^r ρ(w,u)^s) dV(w) = C / ρ(z,u)^{r+s-t-n-1},
///
/// C = 2^{n+1} π^n Γ(1+t) Γ(r+s-t-n-1) / (Γ(r) Γ(s)).
pub fn forelli_rudin_constant(n: usize, r: f64, s: f64, t: f64) -> Result<f64> {
    let nf = n as f64;
    if !(r > 0.0 && s > 0.0) {
        return Err(TubeError::InvalidParameter(format!(
            "exponents r = {r}, s = {s} must be positive"
        )));
    }
    if t <= -1.0 {
        return Err(TubeError::InvalidParameter(format!(
            "t = {t} must exceed -1"
        )));
    }
    let excess = r + s - t - nf - 1.0;
    if excess <= 0.0 {
        return Err(TubeError::InvalidParameter(format!(
            "r + s - t - n - 1 = {excess} must be positive"
        )));
    }
    Ok(
        ((nf + 1.0) * 2f64.ln() + nf * PI.ln() + ln_gamma(1.0 + t) + ln_gamma(excess)
            - ln_gamma(r)
            - ln_gamma(s))
        .exp(),
    )
}

/// Constant of the one-point integral ∫ ρ(w)^t / |ρ(z,w)|^s dV(w) = C / ρ(z)^{s-t-n-1}.
///
/// At z = u the modulus |ρ(z,w)|^s factors as ρ(z,w)^{s/2} ρ(w,z)^{s/2}, and the affine
/// automorphisms together with the dilations carry any z to a multiple of the base point, so
/// the two-point constant with r = s/2 applies at every z.
pub fn forelli_rudin_single_constant(n: usize, s: f64, t: f64) -> Result<f64> {
    forelli_rudin_constant(n, s / 2.0, s / 2.0, t)
}

/// Principal branch of `base^exponent`.
///
/// Integer exponents use repeated multiplication and accept any nonzero base. Non-integer
/// exponents require Re(base) > 0, where the principal branch is continuous.
pub fn principal_pow(base: Complex64, exponent: f64) -> Result<Complex64> {
    if exponent.fract() == 0.0 && exponent.abs() < 64.0 {
        return Ok(base.powi(exponent as i32));
    }
    if base.re <= 0.0 {
        return Err(TubeError::BranchCut { re: base.re });
    }
    Ok((base.ln() * exponent).exp())
}
