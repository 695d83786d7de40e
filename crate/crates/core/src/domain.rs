//! Points of the tube domain over the parabolic base and the sesquiholomorphic pairing ρ.
//!
//! A point z = x + iy of C^n lies in the tube when its imaginary part lies in the base
//! {y : |y'|² < y_n}, where y' collects the first n-1 coordinates. The defect
//! ρ(z) = y_n - |y'|² measures the distance to the boundary and is cached on every point.

use num_complex::Complex64;

use crate::error::{Result, TubeError};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A point of C^n with its cached defect ρ(z) = Im z_n - |Im z'|².
#[derive(Clone, Debug, PartialEq)]
pub struct TubePoint {
    coords: Vec<Complex64>,
    defect: f64,
}

impl TubePoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(TubeError::ZeroDimension);
        }
        let defect = defect_of(&coords);
        Ok(Self { coords, defect })
    }

    /// Builds a point whose defect is known in closed form (e.g. images of the Cayley map,
    /// where y_n - |y'|² cancels catastrophically for large |z|).
    pub fn with_defect(coords: Vec<Complex64>, defect: f64) -> Result<Self> {
        if coords.is_empty() {
            return Err(TubeError::ZeroDimension);
        }
        Ok(Self { coords, defect })
    }

    /// The base point **i** = (0', i).
    pub fn base(n: usize) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        let mut coords = vec![Complex64::new(0.0, 0.0); n];
        coords[n - 1] = I;
        Self {
            coords,
            defect: 1.0,
        }
    }

    /// (0', x + i y): a point on the symmetry axis with defect y.
    pub fn on_axis(n: usize, x: f64, y: f64) -> Self {
        let mut coords = vec![Complex64::new(0.0, 0.0); n];
        coords[n - 1] = Complex64::new(x, y);
        Self { coords, defect: y }
    }

    pub fn from_parts(prime: &[Complex64], last: Complex64) -> Self {
        let mut coords = prime.to_vec();
        coords.push(last);
        let defect = defect_of(&coords);
        Self { coords, defect }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    /// z' = (z_1, ..., z_{n-1}); empty when n = 1.
    pub fn prime(&self) -> &[Complex64] {
        &self.coords[..self.coords.len() - 1]
    }

    pub fn last(&self) -> Complex64 {
        self.coords[self.coords.len() - 1]
    }

    pub fn defect(&self) -> f64 {
        self.defect
    }

    pub fn is_interior(&self) -> bool {
        self.defect > 0.0
    }

    /// Returns the point unchanged if interior, otherwise `NotInterior`.
    pub fn require_interior(&self) -> Result<&Self> {
        if self.is_interior() {
            Ok(self)
        } else {
            Err(TubeError::NotInterior {
                defect: self.defect,
            })
        }
    }

    /// Imaginary parts of all coordinates.
    pub fn imag(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.im).collect()
    }

    /// Translates one coordinate; the defect is recomputed from coordinates.
    pub fn shifted(&self, index: usize, delta: Complex64) -> Self {
        let mut coords = self.coords.clone();
        coords[index] += delta;
        let defect = defect_of(&coords);
        Self { coords, defect }
    }

    /// Translates all coordinates by `delta`.
    pub fn offset(&self, delta: &[Complex64]) -> Self {
        let coords: Vec<Complex64> = self.coords.iter().zip(delta).map(|(a, b)| a + b).collect();
        let defect = defect_of(&coords);
        Self { coords, defect }
    }
}

fn defect_of(coords: &[Complex64]) -> f64 {
    let n = coords.len();
    let prime_sq: f64 = coords[..n - 1].iter().map(|c| c.im * c.im).sum();
    coords[n - 1].im - prime_sq
}

/// Dimension and weight exponent fixing dV_α = ρ(z)^α dV and the kernel normalization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainConfig {
    n: usize,
    alpha: f64,
}

impl DomainConfig {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(TubeError::ZeroDimension);
        }
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(TubeError::InvalidWeight(alpha));
        }
        Ok(Self { n, alpha })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.n, alpha)
    }

    /// Kernel exponent n + 1 + α.
    pub fn kernel_exponent(&self) -> f64 {
        self.n as f64 + 1.0 + self.alpha
    }
}

/// ρ(z,w) = ¼((z' - w̄')·(z' - w̄') - 2i(z_n - w̄_n)); holomorphic in z, antiholomorphic in w.
pub fn rho(z: &TubePoint, w: &TubePoint) -> Complex64 {
    assert_eq!(z.dim(), w.dim(), "rho: dimension mismatch");
    let prime: Complex64 = z
        .prime()
        .iter()
        .zip(w.prime())
        .map(|(a, b)| {
            let d = a - b.conj();
            d * d
        })
        .sum();
    0.25 * (prime - 2.0 * I * (z.last() - w.last().conj()))
}

/// ρ(z) = ρ(z,z) = y_n - |y'|².
pub fn rho_self(z: &TubePoint) -> f64 {
    z.defect()
}

pub fn contains(z: &TubePoint) -> bool {
    z.is_interior()
}

/// Upper half-plane pairing ρ(z,w) = (z - w̄)/(2i), the n = 1 case written without a z' block.
pub fn rho_half_plane(z: Complex64, w: Complex64) -> Complex64 {
    (z - w.conj()) / (2.0 * I)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn base_point_pairing_is_one() {
        for n in 1..=4 {
            let i = TubePoint::base(n);
            assert!((rho(&i, &i) - c(1.0, 0.0)).norm() < 1e-15);
            assert_eq!(rho_self(&i), 1.0);
            assert!(contains(&i));
        }
    }

    #[test]
    fn hand_evaluated_pairing() {
        let z = TubePoint::new(vec![c(0.0, 0.0), c(0.0, 1.0)]).unwrap();
        let w = TubePoint::new(vec![c(1.0, 0.0), c(0.0, 2.0)]).unwrap();
        assert!((rho(&z, &w) - c(1.75, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn defect_examples() {
        let z = TubePoint::new(vec![c(0.0, 0.0), c(3.7, 5.0)]).unwrap();
        assert_eq!(rho_self(&z), 5.0);
        let boundary = TubePoint::new(vec![c(0.0, 1.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(rho_self(&boundary), 0.0);
        assert!(!contains(&boundary));
    }

    #[test]
    fn membership_examples() {
        assert!(!contains(&TubePoint::new(vec![c(0.0, -1.0)]).unwrap()));
        assert!(!contains(&TubePoint::new(vec![c(0.0, -1.0)]).unwrap()));
        assert!(!contains(
            &TubePoint::new(vec![c(0.0, 2.0), c(0.0, 1.0)]).unwrap()
        ));
        let lower = TubePoint::new(vec![c(0.0, 0.0), c(0.0, -1.0)]).unwrap();
        assert!(!contains(&lower));
    }

    #[test]
    fn config_rejects_bad_weight() {
        assert!(DomainConfig::new(2, -1.0).is_err());
        assert!(DomainConfig::new(0, 0.0).is_err());
        assert!(DomainConfig::new(2, f64::NAN).is_err());
        let cfg = DomainConfig::new(2, 0.5).unwrap();
        assert_eq!(cfg.kernel_exponent(), 3.5);
    }

    #[test]
    fn empty_coordinates_rejected() {
        assert_eq!(TubePoint::new(vec![]), Err(TubeError::ZeroDimension));
    }

    fn point_strategy(n: usize) -> impl Strategy<Value = TubePoint> {
        (
            proptest::collection::vec((-3.0..3.0f64, -2.0..2.0f64), n - 1),
            -5.0..5.0f64,
            0.01..10.0f64,
        )
            .prop_map(|(prime, xn, extra)| {
                let prime: Vec<Complex64> = prime.into_iter().map(|(a, b)| c(a, b)).collect();
                let yp: f64 = prime.iter().map(|p| p.im * p.im).sum();
                TubePoint::from_parts(&prime, c(xn, yp + extra))
            })
    }

    proptest! {
        #[test]
        fn pairing_diagonal_is_defect(z in point_strategy(3)) {
            let d = rho(&z, &z);
            prop_assert!(d.im.abs() < 1e-12);
            prop_assert!((d.re - rho_self(&z)).abs() < 1e-12 * (1.0 + d.re.abs()));
        }

        #[test]
        fn pairing_is_hermitian(z in point_strategy(2), w in point_strategy(2)) {
            let a = rho(&z, &w);
            let b = rho(&w, &z).conj();
            prop_assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()));
        }

        #[test]
        fn twice_pairing_dominates_defects(z in point_strategy(3), w in point_strategy(3)) {
            let lhs = 2.0 * rho(&z, &w).norm();
            prop_assert!(lhs >= rho_self(&z).max(rho_self(&w)) * (1.0 - 1e-12));
        }

        #[test]
        fn half_plane_path_agrees(x in -5.0..5.0f64, y in 0.01..5.0f64, u in -5.0..5.0f64, v in 0.01..5.0f64) {
            let z = TubePoint::new(vec![c(x, y)]).unwrap();
            let w = TubePoint::new(vec![c(u, v)]).unwrap();
            let general = rho(&z, &w);
            let special = rho_half_plane(c(x, y), c(u, v));
            prop_assert!((general - special).norm() < 1e-14 * (1.0 + general.norm()));
        }
    }
}
