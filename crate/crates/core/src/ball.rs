//! The unit ball side: Cayley transform, Möbius involutions, tube automorphisms and the
//! Bergman metric.
//!
//! Every map here carries the boundary defect through a closed form instead of recomputing
//! it from coordinates. Near the boundary (or far out in the tube) the defect is a small
//! difference of large numbers, and the closed forms keep full relative accuracy there.

use num_complex::Complex64;

use crate::domain::{rho, TubePoint};
use crate::error::{Result, TubeError};

const I: Complex64 = Complex64::new(0.0, 1.0);
const POLE_GUARD: f64 = 1e-14;
const BALL_TOL: f64 = 1e-12;

/// A point ξ of the unit ball B_n with cached 1 - |ξ|².
#[derive(Clone, Debug, PartialEq)]
pub struct BallPoint {
    coords: Vec<Complex64>,
    defect: f64,
}

impl BallPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(TubeError::ZeroDimension);
        }
        let norm_sq: f64 = coords.iter().map(|c| c.norm_sqr()).sum();
        if norm_sq >= 1.0 - BALL_TOL {
            return Err(TubeError::NotInBall { norm_sq });
        }
        Ok(Self {
            coords,
            defect: 1.0 - norm_sq,
        })
    }

    /// Builds a point whose 1 - |ξ|² is known in closed form.
    pub fn with_defect(coords: Vec<Complex64>, defect: f64) -> Result<Self> {
        if coords.is_empty() {
            return Err(TubeError::ZeroDimension);
        }
        if !(defect > 0.0) {
            return Err(TubeError::NotInBall {
                norm_sq: 1.0 - defect,
            });
        }
        Ok(Self { coords, defect })
    }

    pub fn origin(n: usize) -> Self {
        Self {
            coords: vec![Complex64::new(0.0, 0.0); n],
            defect: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn prime(&self) -> &[Complex64] {
        &self.coords[..self.coords.len() - 1]
    }

    pub fn last(&self) -> Complex64 {
        self.coords[self.coords.len() - 1]
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    /// 1 - |ξ|².
    pub fn defect(&self) -> f64 {
        self.defect
    }
}

/// ⟨ξ, η⟩ = Σ ξ_k conj(η_k).
pub fn inner(xi: &[Complex64], eta: &[Complex64]) -> Complex64 {
    xi.iter().zip(eta).map(|(a, b)| a * b.conj()).sum()
}

fn bilinear(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Φ(ξ) = (√2 ξ'/(1+ξ_n), i(1-ξ_n)/(1+ξ_n) - i ξ'·ξ'/(1+ξ_n)²).
pub fn cayley(xi: &BallPoint) -> Result<TubePoint> {
    cayley_raw(xi.coords(), xi.defect())
}

/// Φ on raw coordinates with a caller-supplied 1 - |ξ|²; the tube defect is
/// (1 - |ξ|²)/|1 + ξ_n|².
pub(crate) fn cayley_raw(xi: &[Complex64], ball_defect: f64) -> Result<TubePoint> {
    let n = xi.len();
    let one_plus = 1.0 + xi[n - 1];
    let modulus = one_plus.norm();
    if modulus < POLE_GUARD {
        return Err(TubeError::Pole {
            map: "cayley",
            modulus,
        });
    }
    let inv = one_plus.inv();
    let mut coords: Vec<Complex64> = xi[..n - 1]
        .iter()
        .map(|c| std::f64::consts::SQRT_2 * c * inv)
        .collect();
    let quad = bilinear(&xi[..n - 1], &xi[..n - 1]);
    let last = I * (1.0 - xi[n - 1]) * inv - I * quad * inv * inv;
    coords.push(last);
    TubePoint::with_defect(coords, ball_defect / (modulus * modulus))
}

/// Φ⁻¹(w) = (√2 i w'/(i + q), (i - q)/(i + q)) with q = w_n + (i/2) w'·w'.
///
/// i + q = 2i ρ(w, **i**), so the pole guard is on |ρ(w, **i**)|.
pub fn cayley_inv(z: &TubePoint) -> Result<BallPoint> {
    z.require_interior()?;
    let n = z.dim();
    let rho_zi = rho(z, &TubePoint::base(n));
    let modulus = rho_zi.norm();
    if modulus < POLE_GUARD {
        return Err(TubeError::Pole {
            map: "cayley_inv",
            modulus,
        });
    }
    let q = z.last() + 0.5 * I * bilinear(z.prime(), z.prime());
    let inv = (I + q).inv();
    let mut coords: Vec<Complex64> = z
        .prime()
        .iter()
        .map(|c| std::f64::consts::SQRT_2 * I * c * inv)
        .collect();
    coords.push((I - q) * inv);
    BallPoint::with_defect(coords, z.defect() / (modulus * modulus))
}

/// Which way a real Jacobian of the Cayley transform is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// J_R Φ at a ball point: 2^{n+1}/|1 + ξ_n|^{2(n+1)}.
    Forward,
    /// J_R Φ⁻¹ at a tube point: 1/(2^{n+1} |ρ(z, **i**)|^{2(n+1)}).
    Inverse,
}

/// Real Jacobian determinant of Φ or Φ⁻¹ at the point with coordinates `p`.
pub fn cayley_jacobian(direction: Direction, p: &[Complex64]) -> Result<f64> {
    let n = p.len();
    if n == 0 {
        return Err(TubeError::ZeroDimension);
    }
    let e = 2 * (n as i32 + 1);
    match direction {
        Direction::Forward => {
            let modulus = (1.0 + p[n - 1]).norm();
            if modulus < POLE_GUARD {
                return Err(TubeError::Pole {
                    map: "cayley",
                    modulus,
                });
            }
            Ok(2f64.powi(n as i32 + 1) / modulus.powi(e))
        }
        Direction::Inverse => {
            let z = TubePoint::new(p.to_vec())?;
            let modulus = rho(&z, &TubePoint::base(n)).norm();
            if modulus < POLE_GUARD {
                return Err(TubeError::Pole {
                    map: "cayley_inv",
                    modulus,
                });
            }
            Ok(1.0 / (2f64.powi(n as i32 + 1) * modulus.powi(e)))
        }
    }
}

/// The unit-ball involution φ_a(w) = (a - P_a w - s_a Q_a w)/(1 - ⟨w, a⟩), s_a = √(1 - |a|²).
///
/// φ_0 = -id, φ_a(0) = a, φ_a(a) = 0, φ_a∘φ_a = id.
pub fn ball_automorphism(a: &BallPoint, w: &BallPoint) -> Result<BallPoint> {
    let (coords, defect) = mobius(a.coords(), a.defect(), w.coords(), w.defect())?;
    BallPoint::with_defect(coords, defect)
}

/// φ_a on raw coordinates. Returns the image and its 1 - |φ_a(w)|², computed as
/// (1 - |a|²)(1 - |w|²)/|1 - ⟨w, a⟩|².
pub(crate) fn mobius(
    a: &[Complex64],
    a_defect: f64,
    w: &[Complex64],
    w_defect: f64,
) -> Result<(Vec<Complex64>, f64)> {
    let wa = inner(w, a);
    let denom = 1.0 - wa;
    let modulus = denom.norm();
    if modulus < POLE_GUARD {
        return Err(TubeError::Pole {
            map: "ball_automorphism",
            modulus,
        });
    }
    let a_sq: f64 = a.iter().map(|c| c.norm_sqr()).sum();
    let s = a_defect.max(0.0).sqrt();
    let inv = denom.inv();
    let coords = if a_sq == 0.0 {
        w.iter().map(|c| -c).collect()
    } else {
        let scale = wa / a_sq;
        a.iter()
            .zip(w)
            .map(|(ak, wk)| {
                let p = scale * ak;
                (ak - p - s * (wk - p)) * inv
            })
            .collect()
    };
    Ok((coords, a_defect * w_defect / (modulus * modulus)))
}

/// Real Jacobian of φ_a at x: ((1 - |a|²)/|1 - ⟨x, a⟩|²)^{n+1}.
pub fn ball_automorphism_jacobian(a: &BallPoint, x: &[Complex64]) -> f64 {
    let n = a.dim() as i32;
    (a.defect() / (1.0 - inner(x, a.coords())).norm_sqr()).powi(n + 1)
}

/// τ_z = Φ ∘ φ_{Φ⁻¹(z)} ∘ Φ⁻¹; an automorphism of the tube with τ_z(z) = **i**.
pub fn tau(z: &TubePoint, u: &TubePoint) -> Result<TubePoint> {
    let a = cayley_inv(z)?;
    let x = cayley_inv(u)?;
    let (eta, defect) = mobius(a.coords(), a.defect(), x.coords(), x.defect())?;
    cayley_raw(&eta, defect)
}

/// Affine automorphism h_z with h_z(z) = ρ(z)**i** and ρ(h_z u, h_z v) = ρ(u, v):
///
/// h_z(u) = (u' - z', u_n - Re z_n + 2 Im z'·Re z' - 2 Im z'·u' + i|Im z'|²).
pub fn h_map(z: &TubePoint, u: &TubePoint) -> TubePoint {
    assert_eq!(z.dim(), u.dim(), "h_map: dimension mismatch");
    let mut coords: Vec<Complex64> = u
        .prime()
        .iter()
        .zip(z.prime())
        .map(|(a, b)| a - b)
        .collect();
    let mut last = u.last() - z.last().re;
    for (zj, uj) in z.prime().iter().zip(u.prime()) {
        last += 2.0 * zj.im * zj.re - 2.0 * zj.im * uj + I * zj.im * zj.im;
    }
    coords.push(last);
    TubePoint::with_defect(coords, u.defect()).expect("nonempty")
}

/// Anisotropic dilation δ_t(u) = (t u', t² u_n); ρ(δ_t u) = t² ρ(u).
pub fn dilation(t: f64, u: &TubePoint) -> TubePoint {
    let n = u.dim();
    let mut coords: Vec<Complex64> = u.prime().iter().map(|c| c * t).collect();
    coords.push(u.last() * (t * t));
    debug_assert_eq!(coords.len(), n);
    TubePoint::with_defect(coords, t * t * u.defect()).expect("nonempty")
}

/// σ_z = δ_{ρ(z)^{-1/2}} ∘ h_z; σ_z(z) = **i** and J_C σ_z ≡ ρ(z)^{-(n+1)/2}.
pub fn sigma(z: &TubePoint, u: &TubePoint) -> Result<TubePoint> {
    z.require_interior()?;
    u.require_interior()?;
    Ok(dilation(z.defect().powf(-0.5), &h_map(z, u)))
}

/// 1 - t² for the pseudo-hyperbolic distance t, via ρ(z)ρ(w)/|ρ(z,w)|².
fn tube_one_minus_t_sq(z: &TubePoint, w: &TubePoint) -> f64 {
    z.defect() * w.defect() / rho(z, w).norm_sqr()
}

/// β from t and 1 - t²: atanh t = log(1 + t) - ½ log(1 - t²).
fn atanh_from(t: f64, one_minus_t_sq: f64) -> f64 {
    (t.ln_1p() - 0.5 * one_minus_t_sq.ln()).max(0.0)
}

/// Bergman metric of the unit ball, β_B(ξ, η) = atanh |φ_ξ(η)|.
pub fn beta_ball(xi: &BallPoint, eta: &BallPoint) -> Result<f64> {
    let (phi, d) = mobius(xi.coords(), xi.defect(), eta.coords(), eta.defect())?;
    let t = phi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    Ok(atanh_from(t, d.min(1.0)))
}

/// Bergman metric of the tube, β(z, w) = β_B(Φ⁻¹z, Φ⁻¹w).
///
/// Far apart points use 1 - t² = ρ(z)ρ(w)/|ρ(z,w)|², which stays accurate when t → 1.
/// Nearby points go through the ball involution, which keeps t accurate when t → 0.
pub fn beta(z: &TubePoint, w: &TubePoint) -> Result<f64> {
    z.require_interior()?;
    w.require_interior()?;
    let d = tube_one_minus_t_sq(z, w).min(1.0);
    if d > 0.5 {
        return beta_ball(&cayley_inv(z)?, &cayley_inv(w)?);
    }
    Ok(atanh_from((1.0 - d).sqrt(), d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::rho_self;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ball_strategy(n: usize) -> impl Strategy<Value = BallPoint> {
        (
            proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n),
            0.0..0.98f64,
        )
            .prop_map(|(v, r)| {
                let coords: Vec<Complex64> = v.into_iter().map(|(a, b)| c(a, b)).collect();
                let norm = coords
                    .iter()
                    .map(|x| x.norm_sqr())
                    .sum::<f64>()
                    .sqrt()
                    .max(1e-9);
                BallPoint::new(coords.into_iter().map(|x| x * (r / norm)).collect()).unwrap()
            })
    }

    fn tube_strategy(n: usize) -> impl Strategy<Value = TubePoint> {
        (
            proptest::collection::vec((-2.0..2.0f64, -1.5..1.5f64), n - 1),
            -3.0..3.0f64,
            0.05..4.0f64,
        )
            .prop_map(|(prime, xn, extra)| {
                let prime: Vec<Complex64> = prime.into_iter().map(|(a, b)| c(a, b)).collect();
                let yp: f64 = prime.iter().map(|p| p.im * p.im).sum();
                TubePoint::from_parts(&prime, c(xn, yp + extra))
            })
    }

    #[test]
    fn origin_maps_to_base_point() {
        for n in 1..=3 {
            let z = cayley(&BallPoint::origin(n)).unwrap();
            assert_eq!(z.coords(), TubePoint::base(n).coords());
            let back = cayley_inv(&TubePoint::base(n)).unwrap();
            assert!(back.norm_sq() < 1e-30);
        }
    }

    #[test]
    fn half_plane_real_segment() {
        for &t in &[-0.9, -0.3, 0.0, 0.4, 0.95] {
            let z = cayley(&BallPoint::new(vec![c(t, 0.0)]).unwrap()).unwrap();
            let expected = I * (1.0 - t) / (1.0 + t);
            assert!((z.last() - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn pole_and_ball_guards() {
        assert!(BallPoint::new(vec![c(1.0, 0.0)]).is_err());
        assert!(matches!(
            cayley_raw(&[c(-1.0, 0.0)], 1e-3),
            Err(TubeError::Pole { .. })
        ));
        let outside = TubePoint::new(vec![c(0.0, -1.0)]).unwrap();
        assert!(cayley_inv(&outside).is_err());
    }

    #[test]
    fn jacobians_at_base_points() {
        for n in 1..=3usize {
            let f = cayley_jacobian(Direction::Forward, BallPoint::origin(n).coords()).unwrap();
            assert_eq!(f, 2f64.powi(n as i32 + 1));
            let g = cayley_jacobian(Direction::Inverse, TubePoint::base(n).coords()).unwrap();
            assert!((g * f - 1.0).abs() < 1e-15);
        }
        let g = cayley_jacobian(Direction::Inverse, TubePoint::base(1).coords()).unwrap();
        assert_eq!(g, 0.25);
    }

    #[test]
    fn involution_at_zero_is_negation() {
        let w = BallPoint::new(vec![c(0.2, -0.1), c(0.3, 0.4)]).unwrap();
        let img = ball_automorphism(&BallPoint::origin(2), &w).unwrap();
        for (a, b) in img.coords().iter().zip(w.coords()) {
            assert_eq!(*a, -b);
        }
    }

    #[test]
    fn h_map_and_sigma_hit_base_point() {
        let z = TubePoint::new(vec![c(0.3, 0.7), c(-1.2, 2.0)]).unwrap();
        let h = h_map(&z, &z);
        assert!(h.prime()[0].norm() < 1e-15);
        assert!((h.last() - I * rho_self(&z)).norm() < 1e-14);
        let s = sigma(&z, &z).unwrap();
        assert!((s.last() - I).norm() < 1e-14);
    }

    #[test]
    fn half_plane_metric_closed_form() {
        let i = TubePoint::base(1);
        for &y in &[2.0, 5.0, 10.0, 0.1] {
            let w = TubePoint::on_axis(1, 0.0, y);
            let b = beta(&i, &w).unwrap();
            assert!((b - 0.5 * f64::ln(y).abs()).abs() < 1e-12, "y={y}: {b}");
        }
    }

    #[test]
    fn metric_small_separation_is_accurate() {
        let z = TubePoint::base(2);
        let w = TubePoint::on_axis(2, 1e-9, 1.0);
        let b = beta(&z, &w).unwrap();
        // |φ| ≈ |Δz_n|/2 near the base point
        assert!((b - 0.5e-9).abs() < 1e-15, "{b}");
    }

    proptest! {
        #[test]
        fn round_trip_tube(z in tube_strategy(3)) {
            let back = cayley(&cayley_inv(&z).unwrap()).unwrap();
            for (a, b) in back.coords().iter().zip(z.coords()) {
                prop_assert!((a - b).norm() < 1e-10 * (1.0 + b.norm()));
            }
            prop_assert!((back.defect() - z.defect()).abs() < 1e-12 * (1.0 + z.defect()));
        }

        #[test]
        fn defect_identity(z in tube_strategy(2)) {
            let xi = cayley_inv(&z).unwrap();
            let direct = 1.0 - xi.norm_sq();
            let closed = rho_self(&z) / rho(&z, &TubePoint::base(2)).norm_sqr();
            prop_assert!((direct - closed).abs() < 1e-10);
            let last = 1.0 + xi.last();
            let expected = rho(&z, &TubePoint::base(2)).inv();
            prop_assert!((last - expected).norm() < 1e-10);
        }

        #[test]
        fn pairing_identity(xi in ball_strategy(3), eta in ball_strategy(3)) {
            let z = cayley(&xi).unwrap();
            let w = cayley(&eta).unwrap();
            let lhs = rho(&z, &w);
            let rhs = (1.0 - inner(xi.coords(), eta.coords()))
                / ((1.0 + xi.last()) * (1.0 + eta.last().conj()));
            prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
        }

        #[test]
        fn involution_properties(a in ball_strategy(2), w in ball_strategy(2)) {
            let at_a = ball_automorphism(&a, &a).unwrap();
            prop_assert!(at_a.norm_sq() < 1e-20);
            let twice = ball_automorphism(&a, &ball_automorphism(&a, &w).unwrap()).unwrap();
            for (x, y) in twice.coords().iter().zip(w.coords()) {
                prop_assert!((x - y).norm() < 1e-10);
            }
            let at_zero = ball_automorphism(&a, &BallPoint::origin(2)).unwrap();
            for (x, y) in at_zero.coords().iter().zip(a.coords()) {
                prop_assert!((x - y).norm() < 1e-14);
            }
        }

        #[test]
        fn h_map_preserves_pairing(z in tube_strategy(3), u in tube_strategy(3), v in tube_strategy(3)) {
            let a = rho(&h_map(&z, &u), &h_map(&z, &v));
            let b = rho(&u, &v);
            prop_assert!((a - b).norm() < 1e-10 * (1.0 + b.norm()));
        }

        #[test]
        fn tau_sends_center_to_base(z in tube_strategy(2)) {
            let img = tau(&z, &z).unwrap();
            prop_assert!((img.last() - I).norm() < 1e-10);
            prop_assert!(img.prime()[0].norm() < 1e-10);
        }

        #[test]
        fn tau_at_base_point_negates(u in tube_strategy(2)) {
            let a = tau(&TubePoint::base(2), &u).unwrap();
            let xi = cayley_inv(&u).unwrap();
            let neg = BallPoint::with_defect(xi.coords().iter().map(|c| -c).collect(), xi.defect()).unwrap();
            let b = cayley(&neg).unwrap();
            for (x, y) in a.coords().iter().zip(b.coords()) {
                prop_assert!((x - y).norm() < 1e-12 * (1.0 + y.norm()));
            }
        }

        #[test]
        fn metric_invariance(v in tube_strategy(2), z in tube_strategy(2), w in tube_strategy(2)) {
            let before = beta(&z, &w).unwrap();
            let after = beta(&tau(&v, &z).unwrap(), &tau(&v, &w).unwrap()).unwrap();
            prop_assert!((before - after).abs() < 1e-8 * (1.0 + before));
            prop_assert!((beta(&w, &z).unwrap() - before).abs() < 1e-12 * (1.0 + before));
        }

        #[test]
        fn sigma_preserves_metric(v in tube_strategy(3), z in tube_strategy(3), w in tube_strategy(3)) {
            let before = beta(&z, &w).unwrap();
            let after = beta(&sigma(&v, &z).unwrap(), &sigma(&v, &w).unwrap()).unwrap();
            prop_assert!((before - after).abs() < 1e-8 * (1.0 + before));
        }
    }
}
