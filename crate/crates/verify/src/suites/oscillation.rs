//! Mean oscillation, the Lipschitz bound for Bloch functions and the BMO/Bloch ratio under
//! grid refinement.

use num_complex::Complex64;
use rayon::prelude::*;
use tube_core::calculus::invariant_gradient_norm;
use tube_core::functions::{
    make_bounded_symbol, make_log_rho, make_rho_power, FunctionHandle, SymbolKind,
};
use tube_core::oscillation::{
    center_comparison, lipschitz_violations, mean_oscillation, mean_oscillation_profile, vmo_trend,
    OscillationParams,
};
use tube_core::sampling::{random_tube_points, rho_ladder, structured_grid, BASE_GRID_SIZE};
use tube_core::{DomainConfig, Result, TubePoint};

use super::derived_seed;
use crate::check::{max_of, Check, Outcome, Tolerance};
use crate::SuiteConfig;

const LEVELS: u32 = 2;

fn representatives(n: usize) -> Result<Vec<FunctionHandle>> {
    let u0 = TubePoint::from_parts(
        &vec![Complex64::new(0.2, 0.1); n - 1],
        Complex64::new(0.5, 1.5),
    );
    Ok(vec![
        make_rho_power(&TubePoint::base(n), 1.0)?,
        make_rho_power(&u0, 2.0)?,
        make_log_rho(&TubePoint::base(n))?,
    ])
}

/// Grid values at levels 0..=LEVELS as prefix maxima of one profile over the finest grid.
fn level_maxima(profile: &[f64], n_halton: usize) -> Vec<f64> {
    let ladder = max_of(profile[n_halton..].iter().copied());
    (0..=LEVELS)
        .map(|l| max_of(profile[..BASE_GRID_SIZE << l].iter().copied()).max(ladder))
        .collect()
}

pub fn checks(config: &SuiteConfig) -> Vec<Check> {
    let n = config.n_or(1);
    let alpha = config.alpha_or(0.0);
    let spec = config.quad(2000, None);
    let seed = config.seed;
    let mut out = Vec::new();
    out.push(Check::new(
        "constant-has-zero-oscillation",
        "mean-oscillation",
        move || {
            let cfg = DomainConfig::new(n, alpha)?;
            let grid = structured_grid(n, 0)?;
            let op = OscillationParams::new(1.0, 2.0, grid.clone())?;
            let k = make_bounded_symbol(SymbolKind::Constant(Complex64::new(0.7, -0.2)));
            let mo: Vec<f64> = grid
                .iter()
                .take(20)
                .map(|z| mean_oscillation(&k, z, &op, &cfg, &spec))
                .collect::<Result<_>>()?;
            Ok(Outcome::equal(0.0, max_of(mo), Tolerance::Absolute(1e-12)))
        },
    ));
    out.push(Check::new(
        "center-robustness",
        "mean-oscillation-center",
        move || {
            let cfg = DomainConfig::new(n, alpha)?;
            let grid: Vec<TubePoint> = structured_grid(n, 0)?.into_iter().take(50).collect();
            let op = OscillationParams::new(1.0, 2.0, grid.clone())?;
            let mut violations = 0;
            let mut worst: f64 = 0.0;
            for f in representatives(n)?
                .iter()
                .chain([&make_bounded_symbol(SymbolKind::Phase)])
            {
                let pairs: Vec<(f64, f64)> = grid
                    .par_iter()
                    .map(|z| center_comparison(f, z, &op, &cfg, &spec))
                    .collect::<Result<_>>()?;
                for (mo, about_value) in pairs {
                    worst = worst.max(mo / about_value);
                    if mo > 2.0 * about_value {
                        violations += 1;
                    }
                }
            }
            Ok(Outcome::no_violations(violations)
                .with_note(format!("max MO / mean |f - f(z)| = {worst:.4}")))
        },
    ));
    out.push(Check::new(
        "bloch-lipschitz",
        "bloch-lipschitz",
        move || {
            let mut violations = 0;
            for (k, f) in representatives(n)?.iter().take(2).enumerate() {
                let norm = f.meta().bloch_norm.expect("closed-form norm");
                let zs = random_tube_points(n, 1000, derived_seed(seed, 2 * k as u64), 0.95)?;
                let ws = random_tube_points(n, 1000, derived_seed(seed, 2 * k as u64 + 1), 0.95)?;
                let pairs: Vec<_> = zs.into_iter().zip(ws).collect();
                violations += lipschitz_violations(f, &pairs, norm, 1e-12)?;
            }
            Ok(Outcome::no_violations(violations))
        },
    ));
    for (k, label) in ["rho^-1", "rho(.,u0)^-2", "log rho"]
        .into_iter()
        .enumerate()
    {
        out.push(Check::new(
            format!("bmo-bloch-ratio {label}"),
            "bmo-bloch-equivalence",
            move || {
                let cfg = DomainConfig::new(n, alpha)?;
                let f = &representatives(n)?[k];
                let mut grid = structured_grid(n, LEVELS)?;
                grid.truncate(BASE_GRID_SIZE << LEVELS);
                let n_halton = grid.len();
                grid.extend(rho_ladder(n));
                let op = OscillationParams::new(1.0, 2.0, grid.clone())?;
                let mo = mean_oscillation_profile(f, &op, &cfg, &spec)?;
                let grad: Vec<f64> = grid
                    .par_iter()
                    .map(|z| invariant_gradient_norm(f, z))
                    .collect::<Result<_>>()?;
                let ratios: Vec<f64> = level_maxima(&mo, n_halton)
                    .iter()
                    .zip(level_maxima(&grad, n_halton))
                    .map(|(b, g)| b / g)
                    .collect();
                let spread = max_of(ratios.iter().copied())
                    / ratios.iter().copied().fold(f64::INFINITY, f64::min);
                let note = format!(
                    "bmo/bloch by level: {}",
                    ratios
                        .iter()
                        .map(|r| format!("{r:.4e}"))
                        .collect::<Vec<_>>()
                        .join(", ")
                );
                Ok(Outcome::at_most(2.0, spread, Tolerance::Absolute(0.0))
                    .with_provenance("monte-carlo")
                    .with_note(note))
            },
        ));
    }
    out.push(Check::new(
        "vanishing-oscillation-trend",
        "vanishing-mean-oscillation",
        move || {
            let cfg = DomainConfig::new(n, alpha)?;
            let op = OscillationParams::new(1.0, 2.0, vec![TubePoint::base(n)])?;
            let f = make_log_rho(&TubePoint::base(n))?;
            let trend = vmo_trend(&f, &op, &cfg, &spec)?;
            let last = trend.toward_boundary.last().map_or(f64::NAN, |p| p.1);
            let fmt = |s: &[(f64, f64)]| {
                s.iter()
                    .map(|(_, v)| format!("{v:.3e}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            Ok(Outcome::diagnostic(0.0, last).with_note(format!(
                "log rho: toward boundary [{}], toward infinity [{}]",
                fmt(&trend.toward_boundary),
                fmt(&trend.toward_infinity)
            )))
        },
    ));
    out
}
