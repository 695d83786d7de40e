use num_complex::Complex64;
use tube_core::functions::{make_bounded_symbol, make_rho_power, FunctionHandle, SymbolKind};
use tube_core::kernels::{
    kernel_l1_divergence, kernel_norm_power, modified_kernel_l1, modified_project,
    modified_project_gradient, modified_projection_gradient_bound, representation_check, t_alpha,
    t_general, KernelParams, OperatorParams,
};
use tube_core::special::forelli_rudin_single_constant;
use tube_core::{rho, DomainConfig, QuadratureSpec, TubePoint};

fn params(n: usize, alpha: f64) -> KernelParams {
    KernelParams::new(DomainConfig::new(n, alpha).unwrap())
}

#[test]
fn reproducing_with_explicit_weight() {
    let kp = params(1, 1.0);
    let f = make_rho_power(&TubePoint::base(1), 3.0).unwrap();
    let z = TubePoint::on_axis(1, 0.5, 2.0);
    let r = t_alpha(&f, &z, &kp, &QuadratureSpec::new(200_000, 4)).unwrap();
    let target = f.eval(&z);
    assert!(
        (r.value - target).norm() <= (3.0 * r.stderr).max(0.02 * target.norm()),
        "{r:?} {target}"
    );
}

#[test]
fn semi_analytic_first_order() {
    // T_1(ρ · (3i/2) ρ(·, i)^{-4})(z) = i ρ(z, i)^{-3}
    let kp = params(1, 1.0);
    let i = TubePoint::base(1);
    let g = FunctionHandle::new("rho L f", move |w: &TubePoint| {
        w.defect() * Complex64::new(0.0, 1.5) * rho(w, &i).powi(-4)
    });
    let z = TubePoint::on_axis(1, -0.4, 1.5);
    let r = t_alpha(&g, &z, &kp, &QuadratureSpec::new(300_000, 6)).unwrap();
    let target = Complex64::new(0.0, 1.0) * rho(&z, &TubePoint::base(1)).powi(-3);
    assert!(
        (r.value - target).norm() <= (3.0 * r.stderr).max(0.02 * target.norm()),
        "{r:?} {target}"
    );
}

#[test]
fn representation_sign_at_first_order() {
    let kp = params(1, 1.0);
    let f = make_rho_power(&TubePoint::base(1), 3.0).unwrap();
    let rep = representation_check(
        &f,
        &TubePoint::base(1),
        1,
        &kp,
        &QuadratureSpec::new(300_000, 2),
        0.02,
    )
    .unwrap();
    assert!(!rep.coincident);
    assert_eq!(rep.winners(), vec!["(-2i)^N"]);
}

#[test]
fn missing_oracle_is_reported() {
    let kp = params(1, 1.0);
    let phase = make_bounded_symbol(SymbolKind::Phase);
    assert!(representation_check(
        &phase,
        &TubePoint::base(1),
        1,
        &kp,
        &QuadratureSpec::new(100, 2),
        0.02
    )
    .is_err());
}

#[test]
fn general_operator_example_is_constant_in_z() {
    let cfg = DomainConfig::new(1, 0.0).unwrap();
    let one = make_bounded_symbol(SymbolKind::Constant(Complex64::new(1.0, 0.0)));
    let op = OperatorParams::new(1.5, 0.0, vec![]);
    let expected = forelli_rudin_single_constant(1, 3.5, 0.0).unwrap();
    for z in [
        TubePoint::base(1),
        TubePoint::on_axis(1, 3.0, 0.2),
        TubePoint::on_axis(1, 0.0, 6.0),
    ] {
        let r = t_general(&one, &z, &op, &cfg, &QuadratureSpec::new(200_000, 1)).unwrap();
        assert!(
            (r.value - expected).norm() <= (3.0 * r.stderr).max(0.02 * expected),
            "{r:?} {expected}"
        );
    }
}

#[test]
fn modified_projection_vanishes_at_base_and_is_bounded() {
    let kp = params(1, 0.0);
    let phase = make_bounded_symbol(SymbolKind::Phase);
    let spec = QuadratureSpec::new(100_000, 3).with_kappa(-0.5);
    assert_eq!(
        modified_project(&phase, &TubePoint::base(1), &kp, &spec)
            .unwrap()
            .value,
        Complex64::new(0.0, 0.0)
    );
    let bound = modified_projection_gradient_bound(&kp).unwrap();
    for z in [
        TubePoint::on_axis(1, 1.0, 0.3),
        TubePoint::on_axis(1, -2.0, 3.0),
    ] {
        let g = modified_project_gradient(&phase, &z, &kp, &spec).unwrap();
        assert!(g.norm <= bound + 3.0 * g.stderr, "{} > {bound}", g.norm);
    }
}

#[test]
fn kernel_mass_grows_while_modified_mass_settles() {
    let kp = params(1, 0.0);
    let truncations = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
    let spec = QuadratureSpec::new(400_000, 12).with_kappa(-0.9);
    let div = kernel_l1_divergence(&kp, &truncations, &spec).unwrap();
    assert!(div.is_monotone() && div.has_no_plateau(), "{div:?}");
    let conv =
        modified_kernel_l1(&TubePoint::on_axis(1, 0.5, 2.0), &kp, &truncations, &spec).unwrap();
    assert!(conv.is_cauchy(), "{conv:?}");
}

#[test]
fn kernel_norm_scales_with_defect() {
    // ‖K(z,·)‖_p^p ∝ ρ(z)^{(1-p)(n+1+λ)}
    let kp = params(1, 0.0);
    let spec = QuadratureSpec::new(200_000, 2);
    let a = kernel_norm_power(&TubePoint::on_axis(1, 0.0, 1.0), 2.0, &kp, &spec)
        .unwrap()
        .value
        .re;
    let b = kernel_norm_power(&TubePoint::on_axis(1, 0.0, 4.0), 2.0, &kp, &spec)
        .unwrap()
        .value
        .re;
    let slope = (b / a).ln() / 4f64.ln();
    assert!((slope + 2.0).abs() < 0.2, "{slope}");
}
