//! f = c_N · T_α(ρ^N L_n^N f) with both sign conventions of c_N.

use num_complex::Complex64;
use std::sync::{Arc, OnceLock};
use tube_core::functions::make_rho_power;
use tube_core::kernels::{representation_check, KernelParams, RepresentationReport};
use tube_core::{DomainConfig, QuadratureSpec, TubePoint};

use crate::check::{Check, Outcome, Tolerance};
use crate::SuiteConfig;

const ORDERS: [u32; 3] = [0, 1, 2];

fn points(n: usize) -> Vec<TubePoint> {
    vec![
        TubePoint::base(n),
        TubePoint::on_axis(n, 0.5, 2.0),
        TubePoint::on_axis(n, -1.0, 0.6),
    ]
}

type Runs = Vec<(u32, usize, RepresentationReport)>;

/// Every (N, z) run, computed once and shared between checks.
#[derive(Clone)]
struct Shared {
    n: usize,
    alpha: f64,
    spec: QuadratureSpec,
    rel_tol: f64,
    runs: Arc<OnceLock<Result<Runs, String>>>,
}

impl Shared {
    fn get(&self) -> Result<&Runs, tube_core::TubeError> {
        self.runs
            .get_or_init(|| {
                let kp = KernelParams::new(
                    DomainConfig::new(self.n, self.alpha).map_err(|e| e.to_string())?,
                );
                let f = make_rho_power(&TubePoint::base(self.n), 3.0).map_err(|e| e.to_string())?;
                let mut out = Vec::new();
                for order in ORDERS {
                    for (j, z) in points(self.n).iter().enumerate() {
                        let rep = representation_check(&f, z, order, &kp, &self.spec, self.rel_tol)
                            .map_err(|e| e.to_string())?;
                        out.push((order, j, rep));
                    }
                }
                Ok(out)
            })
            .as_ref()
            .map_err(|e| tube_core::TubeError::InvalidParameter(e.clone()))
    }
}

pub fn checks(config: &SuiteConfig) -> Vec<Check> {
    let n = config.n_or(1);
    let shared = Shared {
        n,
        alpha: config.alpha_or(1.0),
        spec: config.quad(400_000, None),
        rel_tol: config.rel_tol,
        runs: Arc::new(OnceLock::new()),
    };
    let mut out = Vec::new();
    for order in ORDERS {
        for j in 0..points(n).len() {
            let s = shared.clone();
            let anchor = "representation-formula";
            if order == 0 {
                out.push(Check::new(
                    format!("identity N=0 z{j}"),
                    anchor,
                    move || {
                        let (_, _, rep) = s
                            .get()?
                            .iter()
                            .find(|r| r.0 == 0 && r.1 == j)
                            .expect("run exists");
                        let c = &rep.candidates[0];
                        Ok(
                            Outcome::equal(rep.target, c.predicted, Tolerance::Statistical)
                                .with_stderr(c.stderr)
                                .with_provenance("monte-carlo"),
                        )
                    },
                ));
                continue;
            }
            out.push(Check::new(
                format!("single-constant N={order} z{j}"),
                anchor,
                move || {
                    let (_, _, rep) = s
                        .get()?
                        .iter()
                        .find(|r| r.0 == order && r.1 == j)
                        .expect("run exists");
                    let winners = rep.winners();
                    let note = format!(
                        "agreeing: [{}]; predictions: {}",
                        winners.join(", "),
                        rep.candidates
                            .iter()
                            .map(|c| format!(
                                "{} -> {:.6e}{:+.6e}i",
                                c.label, c.predicted.re, c.predicted.im
                            ))
                            .collect::<Vec<_>>()
                            .join(", ")
                    );
                    Ok(
                        Outcome::equal(1.0, winners.len() as f64, Tolerance::Absolute(0.0))
                            .with_stderr(rep.candidates[0].stderr)
                            .with_provenance("monte-carlo")
                            .with_note(note),
                    )
                },
            ));
        }
    }
    let s = shared.clone();
    out.push(Check::new(
        "same-winner",
        "representation-formula",
        move || {
            let mut labels: Vec<&str> = s
                .get()?
                .iter()
                .filter(|(order, _, rep)| *order > 0 && !rep.coincident)
                .flat_map(|(_, _, rep)| rep.winners())
                .collect();
            labels.sort_unstable();
            labels.dedup();
            let note = format!("supported constant: {}", labels.join(" / "));
            Ok(
                Outcome::equal(1.0, labels.len() as f64, Tolerance::Absolute(0.0))
                    .with_note(note)
                    .with_provenance("monte-carlo"),
            )
        },
    ));
    let s = shared;
    out.push(Check::new(
        "semi-analytic N=1 at base",
        "representation-formula",
        move || {
            let (_, _, rep) = s
                .get()?
                .iter()
                .find(|r| r.0 == 1 && r.1 == 0)
                .expect("run exists");
            let expected = Complex64::new(0.0, 1.0) * rep.target;
            Ok(Outcome::estimate(expected, &rep.integral).with_provenance("closed-form"))
        },
    ));
    out
}
