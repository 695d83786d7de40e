//! Monte-Carlo values of two-point integrals against their closed-form constants.

use num_complex::Complex64;
use tube_core::quadrature::integrate_tube_with;
use tube_core::special::forelli_rudin_constant;
use tube_core::{rho, DomainConfig, TubePoint};

use crate::check::{Check, Outcome};
use crate::SuiteConfig;

/// (r, s, t) of ∫ ρ(w)^t / (ρ(i,w)^r ρ(w,i)^s) dV(w).
const CASES: [(f64, f64, f64); 2] = [(2.0, 2.0, 0.0), (3.0, 4.0, 2.0)];

pub fn checks(config: &SuiteConfig) -> Vec<Check> {
    let n = config.n_or(1);
    let alpha = config.alpha_or(0.0);
    let spec = config.quad(1_000_000, None);
    CASES
        .iter()
        .map(|&(r, s, t)| {
            Check::new(
                format!("two-point-integral r={r} s={s} t={t} n={n}"),
                "two-point-integral-constant",
                move || {
                    // dV_α carries ρ^α, so the integrand keeps ρ^{t-α}
                    let cfg = DomainConfig::new(n, alpha)?;
                    let base = TubePoint::base(n);
                    let f = |w: &TubePoint| -> Complex64 {
                        w.defect().powf(t - alpha) / (rho(&base, w).powf(r) * rho(w, &base).powf(s))
                    };
                    let res = integrate_tube_with(f, &cfg, &spec)?;
                    Ok(Outcome::estimate(forelli_rudin_constant(n, r, s, t)?, &res))
                },
            )
        })
        .collect()
}
