//! f = f̂_r + (f - f̂_r) for bounded non-holomorphic symbols, with sampled witnesses.

use rayon::prelude::*;
use tube_core::functions::{make_bounded_symbol, SymbolKind};
use tube_core::oscillation::{ba_profile, bmo_decompose, bo_profile, OscillationParams};
use tube_core::sampling::{rho_ladder, structured_grid, BASE_GRID_SIZE};
use tube_core::{DomainConfig, QuadratureSpec, TubePoint};

use crate::check::{max_of, Check, Outcome, Tolerance};
use crate::SuiteConfig;

fn symbol(k: usize) -> SymbolKind {
    [SymbolKind::Phase, SymbolKind::Smoothstep][k].clone()
}

/// Level-0 and level-1 grid maxima of a profile over (level-1 Halton points, ladder).
fn refinement(profile: &[f64]) -> (f64, f64) {
    let ladder = max_of(profile[2 * BASE_GRID_SIZE..].iter().copied());
    (
        max_of(profile[..BASE_GRID_SIZE].iter().copied()).max(ladder),
        max_of(profile[..2 * BASE_GRID_SIZE].iter().copied()).max(ladder),
    )
}

fn grid(n: usize) -> tube_core::Result<Vec<TubePoint>> {
    let mut g = structured_grid(n, 1)?;
    g.truncate(2 * BASE_GRID_SIZE);
    g.extend(rho_ladder(n));
    Ok(g)
}

pub fn checks(config: &SuiteConfig) -> Vec<Check> {
    let n = config.n_or(1);
    let alpha = config.alpha_or(0.0);
    let inner = config.quad(400, None);
    let probe = QuadratureSpec::new(32, config.seed ^ 0x5eed);
    let mut out = Vec::new();
    for k in 0..2 {
        let label = ["phase", "smoothstep"][k];
        out.push(Check::new(
            format!("parts-sum-to-symbol {label}"),
            "bmo-decomposition",
            move || {
                let cfg = DomainConfig::new(n, alpha)?;
                let g = structured_grid(n, 0)?;
                let op = OscillationParams::new(1.0, 2.0, g.clone())?;
                let f = make_bounded_symbol(symbol(k));
                let (f1, f2) = bmo_decompose(&f, &op, &cfg, &inner);
                let err = max_of(
                    g.par_iter()
                        .map(|z| (f1.eval(z) + f2.eval(z) - f.eval(z)).norm())
                        .collect::<Vec<_>>(),
                );
                Ok(
                    Outcome::equal(0.0, err, Tolerance::Absolute(1e-12))
                        .with_provenance("identity"),
                )
            },
        ));
        for (witness, anchor) in [
            ("bounded-oscillation", "bo-witness"),
            ("bounded-averages", "ba-witness"),
        ] {
            out.push(Check::new(
                format!("{witness}-witness {label}"),
                anchor,
                move || {
                    let cfg = DomainConfig::new(n, alpha)?;
                    let op = OscillationParams::new(1.0, 2.0, grid(n)?)?;
                    let f = make_bounded_symbol(symbol(k));
                    let (f1, f2) = bmo_decompose(&f, &op, &cfg, &inner);
                    let profile = if witness == "bounded-oscillation" {
                        bo_profile(&f1, &op, &cfg, &probe)?
                    } else {
                        ba_profile(&f2, &op, &cfg, &probe)?
                    };
                    let (coarse, fine) = refinement(&profile);
                    let ratio = (fine / coarse).max(coarse / fine);
                    Ok(Outcome::at_most(2.0, ratio, Tolerance::Absolute(0.0))
                        .with_provenance("monte-carlo")
                        .with_note(format!(
                            "witness {coarse:.4e} on the coarse grid, {fine:.4e} refined"
                        )))
                },
            ));
        }
    }
    out
}
