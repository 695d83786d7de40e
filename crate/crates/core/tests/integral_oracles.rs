use num_complex::Complex64;
use std::f64::consts::PI;
use tube_core::quadrature::integrate_tube_with;
use tube_core::special::forelli_rudin_constant;
use tube_core::{rho, DomainConfig, QuadratureSpec, TubePoint};

fn two_point(w: &TubePoint) -> Complex64 {
    let i = TubePoint::base(1);
    w.defect().powi(2) / (rho(&i, w).powi(3) * rho(w, &i).powi(4))
}

fn within(obs: Complex64, stderr: f64, expected: f64) -> bool {
    (obs - expected).norm() <= (3.0 * stderr).max(0.02 * expected.abs())
}

#[test]
fn printed_constants_match_closed_form() {
    assert!((forelli_rudin_constant(1, 2.0, 2.0, 0.0).unwrap() - 4.0 * PI).abs() < 1e-12);
    assert!((forelli_rudin_constant(1, 3.0, 4.0, 2.0).unwrap() - 4.0 * PI / 3.0).abs() < 1e-12);
}

#[test]
fn two_point_integral_reaches_constant() {
    let cfg = DomainConfig::new(1, 0.0).unwrap();
    let r = integrate_tube_with(two_point, &cfg, &QuadratureSpec::new(400_000, 17)).unwrap();
    assert!(within(r.value, r.stderr, 4.0 * PI / 3.0), "{r:?}");
}

#[test]
fn stderr_shrinks_with_samples() {
    let cfg = DomainConfig::new(1, 0.0).unwrap();
    let small = integrate_tube_with(two_point, &cfg, &QuadratureSpec::new(50_000, 5)).unwrap();
    let large = integrate_tube_with(two_point, &cfg, &QuadratureSpec::new(200_000, 5)).unwrap();
    assert!(
        large.stderr <= 0.6 * small.stderr,
        "{} {}",
        small.stderr,
        large.stderr
    );
}

#[test]
fn importance_exponents_agree() {
    let cfg = DomainConfig::new(1, 0.5).unwrap();
    let i = TubePoint::base(1);
    let f = |w: &TubePoint| (rho(&i, w).powi(2) * rho(w, &i).powi(2)).inv();
    let expected = forelli_rudin_constant(1, 2.0, 2.0, 0.5).unwrap();
    let runs: Vec<_> = [0.0, 0.5, 1.5]
        .iter()
        .map(|&k| {
            integrate_tube_with(f, &cfg, &QuadratureSpec::new(200_000, 3).with_kappa(k)).unwrap()
        })
        .collect();
    for r in &runs {
        assert!(within(r.value, r.stderr, expected), "{r:?} vs {expected}");
    }
    for a in &runs {
        for b in &runs {
            let band = 3.0 * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
            assert!((a.value - b.value).norm() <= band.max(0.02 * expected));
        }
    }
}

#[test]
fn seeds_reproduce_and_differ() {
    let cfg = DomainConfig::new(2, 1.0).unwrap();
    let f = |w: &TubePoint| rho(w, &TubePoint::base(2)).powi(-5);
    let a = integrate_tube_with(f, &cfg, &QuadratureSpec::new(30_000, 8)).unwrap();
    let b = integrate_tube_with(f, &cfg, &QuadratureSpec::new(30_000, 8)).unwrap();
    let c = integrate_tube_with(f, &cfg, &QuadratureSpec::new(30_000, 9)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.value, c.value);
}
