//! Test functions on the tube with known derivatives, norms and growth.
//!
//! The holomorphic family is built from powers ρ(·, u0)^{-m} and log ρ(·, u0). Their L^γ
//! derivatives close up because L_j ρ(·, u0) = ½(z̄_j - ū0_j) is antiholomorphic and
//! L_n ρ(·, u0) = -i/2 is constant.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::ball::beta;
use crate::calculus::MultiIndex;
use crate::domain::{rho, TubePoint};
use crate::error::{Result, TubeError};
use crate::special::{pochhammer, principal_pow};

const HALF_I: Complex64 = Complex64::new(0.0, 0.5);

pub type Evaluator = Arc<dyn Fn(&TubePoint) -> Complex64 + Send + Sync>;
pub type LOracle = Arc<dyn Fn(&TubePoint, &MultiIndex) -> Complex64 + Send + Sync>;

/// What is known about a function without evaluating it.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionMeta {
    pub label: String,
    pub holomorphic: bool,
    /// m such that |f(z)| ≲ |ρ(z, **i**)|^{-m} at infinity, with f bounded near the boundary.
    pub decay: Option<f64>,
    /// Certified bound on sup |f|.
    pub sup_bound: Option<f64>,
    /// Exact value of sup |∇̃f|.
    pub bloch_norm: Option<f64>,
}

impl FunctionMeta {
    fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            holomorphic: false,
            decay: None,
            sup_bound: None,
            bloch_norm: None,
        }
    }
}

/// A complex function on the tube, optionally with exact L^γ derivatives.
#[derive(Clone)]
pub struct FunctionHandle {
    eval: Evaluator,
    exact_l: Option<LOracle>,
    meta: FunctionMeta,
}

impl fmt::Debug for FunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionHandle")
            .field("meta", &self.meta)
            .field("exact_l", &self.exact_l.is_some())
            .finish()
    }
}

impl FunctionHandle {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&TubePoint) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            exact_l: None,
            meta: FunctionMeta::new(label),
        }
    }

    /// A holomorphic function given only by its values.
    pub fn holomorphic<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&TubePoint) -> Complex64 + Send + Sync + 'static,
    {
        let mut h = Self::new(label, f);
        h.meta.holomorphic = true;
        h
    }

    pub fn with_exact_l<G>(mut self, g: G) -> Self
    where
        G: Fn(&TubePoint, &MultiIndex) -> Complex64 + Send + Sync + 'static,
    {
        self.exact_l = Some(Arc::new(g));
        self
    }

    pub fn with_meta(mut self, meta: FunctionMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn eval(&self, z: &TubePoint) -> Complex64 {
        (self.eval)(z)
    }

    pub fn meta(&self) -> &FunctionMeta {
        &self.meta
    }

    pub fn label(&self) -> &str {
        &self.meta.label
    }

    pub fn is_holomorphic(&self) -> bool {
        self.meta.holomorphic
    }

    pub fn has_exact_l(&self) -> bool {
        self.exact_l.is_some()
    }

    /// Exact L^γ f(z), if an oracle is attached.
    pub fn exact_l(&self, z: &TubePoint, gamma: &MultiIndex) -> Result<Complex64> {
        match &self.exact_l {
            Some(g) => Ok(g(z, gamma)),
            None => Err(TubeError::MissingOracle(self.meta.label.clone())),
        }
    }

    /// f ∈ A^p_λ, decided from the decay exponent: p·m - λ > n + 1.
    pub fn in_bergman_space(&self, n: usize, p: f64, lambda: f64) -> Option<bool> {
        self.meta.decay.map(|m| p * m - lambda > n as f64 + 1.0)
    }

    /// f ∈ S_t, i.e. sup |ρ(z, **i**)|^t |f(z)| < ∞.
    pub fn in_decay_class(&self, t: f64) -> Option<bool> {
        self.meta.decay.map(|m| t <= m)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let f = self.eval.clone();
        let exact = self
            .exact_l
            .clone()
            .map(|g| -> LOracle { Arc::new(move |z, k| c * g(z, k)) });
        let mut meta = self.meta.clone();
        meta.label = format!("({c})*{}", meta.label);
        meta.sup_bound = meta.sup_bound.map(|s| s * c.norm());
        meta.bloch_norm = meta.bloch_norm.map(|s| s * c.norm());
        if c == Complex64::new(0.0, 0.0) {
            meta.decay = Some(f64::INFINITY);
        }
        Self {
            eval: Arc::new(move |z| c * f(z)),
            exact_l: exact,
            meta,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1.0, "+")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1.0, "-")
    }

    fn combine(&self, other: &Self, sign: f64, op: &str) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let exact = match (&self.exact_l, &other.exact_l) {
            (Some(a), Some(b)) => {
                let (a, b) = (a.clone(), b.clone());
                Some(
                    Arc::new(move |z: &TubePoint, k: &MultiIndex| a(z, k) + sign * b(z, k))
                        as LOracle,
                )
            }
            _ => None,
        };
        let (m1, m2) = (&self.meta, &other.meta);
        let meta = FunctionMeta {
            label: format!("{}{op}{}", m1.label, m2.label),
            holomorphic: m1.holomorphic && m2.holomorphic,
            decay: m1.decay.zip(m2.decay).map(|(a, b)| a.min(b)),
            sup_bound: m1.sup_bound.zip(m2.sup_bound).map(|(a, b)| a + b),
            bloch_norm: None,
        };
        Self {
            eval: Arc::new(move |z| f(z) + sign * g(z)),
            exact_l: exact,
            meta,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let (m1, m2) = (&self.meta, &other.meta);
        let meta = FunctionMeta {
            label: format!("{}*{}", m1.label, m2.label),
            holomorphic: m1.holomorphic && m2.holomorphic,
            decay: m1.decay.zip(m2.decay).map(|(a, b)| a + b),
            sup_bound: m1.sup_bound.zip(m2.sup_bound).map(|(a, b)| a * b),
            bloch_norm: None,
        };
        Self {
            eval: Arc::new(move |z| f(z) * g(z)),
            exact_l: None,
            meta,
        }
    }

    /// Pointwise complex conjugate; antiholomorphic when f is holomorphic.
    pub fn conj(&self) -> Self {
        let f = self.eval.clone();
        let mut meta = self.meta.clone();
        meta.label = format!("conj({})", meta.label);
        meta.holomorphic = false;
        meta.bloch_norm = None;
        Self {
            eval: Arc::new(move |z| f(z).conj()),
            exact_l: None,
            meta,
        }
    }

    /// |f|², real valued.
    pub fn abs_sq(&self) -> Self {
        let f = self.eval.clone();
        let mut meta = FunctionMeta::new(format!("|{}|^2", self.meta.label));
        meta.sup_bound = self.meta.sup_bound.map(|s| s * s);
        Self {
            eval: Arc::new(move |z| Complex64::new(f(z).norm_sqr(), 0.0)),
            exact_l: None,
            meta,
        }
    }

    /// f ∘ ψ for a map ψ of the tube into itself; ψ holomorphic keeps f holomorphic.
    pub fn compose<P>(&self, label: &str, psi: P, psi_holomorphic: bool) -> Self
    where
        P: Fn(&TubePoint) -> Result<TubePoint> + Send + Sync + 'static,
    {
        let f = self.eval.clone();
        let mut meta = FunctionMeta::new(format!("{}∘{label}", self.meta.label));
        meta.holomorphic = self.meta.holomorphic && psi_holomorphic;
        meta.sup_bound = self.meta.sup_bound;
        let eval = move |z: &TubePoint| match psi(z) {
            Ok(w) => f(&w),
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        };
        Self {
            eval: Arc::new(eval),
            exact_l: None,
            meta,
        }
    }
}

fn nan() -> Complex64 {
    Complex64::new(f64::NAN, f64::NAN)
}

/// Product Π_j A_j^{γ_j} · (-i/2)^{γ_n} with A_j = ½(z̄_j - ū0_j) = L_j ρ(·, u0).
fn first_order_product(z: &TubePoint, u0: &TubePoint, gamma: &MultiIndex) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (j, (zj, uj)) in z.prime().iter().zip(u0.prime()).enumerate() {
        let a = 0.5 * (zj.conj() - uj.conj());
        acc *= a.powi(gamma.get(j) as i32);
    }
    acc * (-HALF_I).powi(gamma.last() as i32)
}

/// Closed-form sup |∇̃ ρ(·, u0)^{-m}| = √2 ρ(u0)^{-m} · m (2m/(m+1))^m · 2/(m+1).
pub fn rho_power_bloch_norm(u0: &TubePoint, m: f64) -> f64 {
    std::f64::consts::SQRT_2 * u0.defect().powf(-m) * m * (2.0 * m / (m + 1.0)).powf(m) * 2.0
        / (m + 1.0)
}

/// f(w) = ρ(w, u0)^{-m} with exact L^γ f = (-1)^k (m)_k ρ^{-m-k} Π A_j^{γ_j} (-i/2)^{γ_n}.
pub fn make_rho_power(u0: &TubePoint, m: f64) -> Result<FunctionHandle> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(TubeError::InvalidParameter(format!(
            "power m = {m} must be positive"
        )));
    }
    u0.require_interior()?;
    let base = u0.clone();
    let eval = move |w: &TubePoint| principal_pow(rho(w, &base), -m).unwrap_or_else(|_| nan());
    let base = u0.clone();
    let exact = move |w: &TubePoint, gamma: &MultiIndex| {
        let k = gamma.order();
        let r = rho(w, &base);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        match principal_pow(r, -m - k as f64) {
            Ok(p) => sign * pochhammer(m, k) * p * first_order_product(w, &base, gamma),
            Err(_) => nan(),
        }
    };
    let meta = FunctionMeta {
        label: format!("rho(.,u0)^-{m}"),
        holomorphic: true,
        decay: Some(m),
        sup_bound: Some((2.0 / u0.defect()).powf(m)),
        bloch_norm: Some(rho_power_bloch_norm(u0, m)),
    };
    Ok(FunctionHandle {
        eval: Arc::new(eval),
        exact_l: Some(Arc::new(exact)),
        meta,
    })
}

/// Σ c_k ρ(·, u_k)^{-m_k}.
pub fn make_rho_power_sum(terms: &[(Complex64, TubePoint, f64)]) -> Result<FunctionHandle> {
    let mut iter = terms.iter();
    let (c, u, m) = iter
        .next()
        .ok_or_else(|| TubeError::InvalidParameter("empty combination".into()))?;
    let mut acc = make_rho_power(u, *m)?.scale(*c);
    for (c, u, m) in iter {
        acc = acc.add(&make_rho_power(u, *m)?.scale(*c));
    }
    Ok(acc)
}

/// f(w) = log ρ(w, u0), principal branch. Bloch with sup |∇̃f| = 2√2, but not little Bloch.
pub fn make_log_rho(u0: &TubePoint) -> Result<FunctionHandle> {
    u0.require_interior()?;
    let base = u0.clone();
    let eval = move |w: &TubePoint| {
        let r = rho(w, &base);
        if r.re > 0.0 {
            r.ln()
        } else {
            nan()
        }
    };
    let base = u0.clone();
    let exact = move |w: &TubePoint, gamma: &MultiIndex| {
        let k = gamma.order();
        let r = rho(w, &base);
        if r.re <= 0.0 {
            return nan();
        }
        if k == 0 {
            return r.ln();
        }
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sign * pochhammer(1.0, k - 1) * r.powi(-(k as i32)) * first_order_product(w, &base, gamma)
    };
    let meta = FunctionMeta {
        label: "log rho(.,u0)".into(),
        holomorphic: true,
        decay: Some(0.0),
        sup_bound: None,
        bloch_norm: Some(2.0 * std::f64::consts::SQRT_2),
    };
    Ok(FunctionHandle {
        eval: Arc::new(eval),
        exact_l: Some(Arc::new(exact)),
        meta,
    })
}

/// f(z) = z_k (0-based), holomorphic but unbounded.
pub fn make_coordinate(k: usize) -> FunctionHandle {
    FunctionHandle::holomorphic(format!("z_{}", k + 1), move |z: &TubePoint| z.coords()[k])
}

/// Bounded symbols with sup |f| ≤ 1.
#[derive(Clone, Debug, PartialEq)]
pub enum SymbolKind {
    /// The constant c (|c| ≤ 1 for the certified bound to hold).
    Constant(Complex64),
    /// exp(i Re z_n), unimodular.
    Phase,
    /// ρ(z)/(1 + ρ(z)) ∈ (0, 1).
    Smoothstep,
    /// exp(1 - 1/(1 - s²)) for s = β(z, center)/radius < 1, zero outside: compact support.
    Bump { center: TubePoint, radius: f64 },
}

pub fn make_bounded_symbol(kind: SymbolKind) -> FunctionHandle {
    let real = |x: f64| Complex64::new(x, 0.0);
    match kind {
        SymbolKind::Constant(c) => {
            let mut h = FunctionHandle::holomorphic(format!("const {c}"), move |_| c);
            h.meta.decay = Some(0.0);
            h.meta.sup_bound = Some(c.norm());
            h.meta.bloch_norm = Some(0.0);
            h.with_exact_l(move |_, g| {
                if g.order() == 0 {
                    c
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        }
        SymbolKind::Phase => {
            let mut h = FunctionHandle::new("phase", |z: &TubePoint| {
                Complex64::from_polar(1.0, z.last().re)
            });
            h.meta.sup_bound = Some(1.0);
            h
        }
        SymbolKind::Smoothstep => {
            let mut h = FunctionHandle::new("smoothstep", move |z: &TubePoint| {
                let r = z.defect();
                real(r / (1.0 + r))
            });
            h.meta.sup_bound = Some(1.0);
            h
        }
        SymbolKind::Bump { center, radius } => {
            let mut h = FunctionHandle::new("bump", move |z: &TubePoint| {
                let s = match beta(z, &center) {
                    Ok(b) => b / radius,
                    Err(_) => return real(0.0),
                };
                if s < 1.0 {
                    real((1.0 - 1.0 / (1.0 - s * s)).exp())
                } else {
                    real(0.0)
                }
            });
            h.meta.sup_bound = Some(1.0);
            h
        }
    }
}

/// z ↦ β(z, center), real valued and 1-Lipschitz in β.
pub fn make_metric_distance(center: &TubePoint) -> FunctionHandle {
    let c = center.clone();
    FunctionHandle::new("beta(., center)", move |z: &TubePoint| {
        Complex64::new(beta(z, &c).unwrap_or(f64::NAN), 0.0)
    })
}

/// sup over `grid` of |ρ(z, **i**)|^t |f(z)|.
pub fn st_decay_check(f: &FunctionHandle, t: f64, grid: &[TubePoint]) -> f64 {
    grid.iter()
        .map(|z| {
            let base = TubePoint::base(z.dim());
            rho(z, &base).norm().powf(t) * f.eval(z).norm()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_points() -> Vec<TubePoint> {
        vec![
            TubePoint::from_parts(&[c(0.3, 0.2)], c(-0.7, 1.5)),
            TubePoint::from_parts(&[c(-1.1, -0.4)], c(2.0, 0.6)),
            TubePoint::from_parts(&[c(0.0, 0.9)], c(0.1, 3.0)),
        ]
    }

    #[test]
    fn rho_power_at_base_point() {
        let f = make_rho_power(&TubePoint::base(2), 3.0).unwrap();
        assert!((f.eval(&TubePoint::base(2)) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn exact_ln_matches_chain_rule() {
        let i = TubePoint::base(2);
        let f = make_rho_power(&i, 3.0).unwrap();
        for w in sample_points() {
            let got = f.exact_l(&w, &MultiIndex::unit(2, 1)).unwrap();
            let want = c(0.0, 1.5) * rho(&w, &i).powi(-4);
            assert!((got - want).norm() < 1e-13 * want.norm());
        }
    }

    #[test]
    fn membership_from_exponent() {
        let f = make_rho_power(&TubePoint::base(1), 3.0).unwrap();
        assert_eq!(f.in_bergman_space(1, 2.0, 0.0), Some(true));
        let g = make_rho_power(&TubePoint::base(1), 0.5).unwrap();
        assert_eq!(g.in_bergman_space(1, 2.0, 0.0), Some(false));
        assert_eq!(f.in_decay_class(3.0), Some(true));
        assert_eq!(f.in_decay_class(3.5), Some(false));
    }

    #[test]
    fn rejects_nonpositive_power() {
        assert!(make_rho_power(&TubePoint::base(1), 0.0).is_err());
        assert!(make_rho_power(&TubePoint::base(1), -2.0).is_err());
    }

    #[test]
    fn bounded_symbols() {
        let one = make_bounded_symbol(SymbolKind::Constant(c(1.0, 0.0)));
        let phase = make_bounded_symbol(SymbolKind::Phase);
        let step = make_bounded_symbol(SymbolKind::Smoothstep);
        assert_eq!(step.eval(&TubePoint::base(2)), c(0.5, 0.0));
        for z in sample_points() {
            assert_eq!(one.eval(&z), c(1.0, 0.0));
            assert!((phase.eval(&z).norm() - 1.0).abs() < 1e-15);
            let s = step.eval(&z).re;
            assert!(s > 0.0 && s < 1.0);
        }
    }

    #[test]
    fn bump_has_compact_support() {
        let b = make_bounded_symbol(SymbolKind::Bump {
            center: TubePoint::base(1),
            radius: 1.0,
        });
        assert!((b.eval(&TubePoint::base(1)).re - 1.0).abs() < 1e-15);
        assert_eq!(b.eval(&TubePoint::on_axis(1, 0.0, 100.0)).re, 0.0);
    }

    #[test]
    fn decay_report() {
        let i = TubePoint::base(2);
        let f = make_rho_power(&i, 3.0).unwrap();
        let grid = sample_points();
        let v = st_decay_check(&f, 3.0, &grid);
        assert!((v - 1.0).abs() < 1e-12);
        let far = vec![
            TubePoint::on_axis(2, 100.0, 1.0),
            TubePoint::on_axis(2, 0.0, 1000.0),
        ];
        let one = make_bounded_symbol(SymbolKind::Constant(c(1.0, 0.0)));
        assert!(st_decay_check(&one, 1.0, &far) > 50.0);
        let zero = one.scale(c(0.0, 0.0));
        assert_eq!(st_decay_check(&zero, 1.0, &grid), 0.0);
    }

    #[test]
    fn combinators_compose_oracles() {
        let i = TubePoint::base(2);
        let u = TubePoint::from_parts(&[c(0.5, 0.3)], c(1.0, 2.0));
        let f = make_rho_power_sum(&[(c(1.0, 0.0), i.clone(), 2.0), (c(0.0, 2.0), u.clone(), 3.0)])
            .unwrap();
        let g1 = make_rho_power(&i, 2.0).unwrap();
        let g2 = make_rho_power(&u, 3.0).unwrap();
        let gamma = MultiIndex::new(vec![1, 1]);
        for w in sample_points() {
            let direct =
                g1.exact_l(&w, &gamma).unwrap() + c(0.0, 2.0) * g2.exact_l(&w, &gamma).unwrap();
            assert!((f.exact_l(&w, &gamma).unwrap() - direct).norm() < 1e-14 * direct.norm());
        }
        assert!(f.is_holomorphic());
        assert!(!f.conj().is_holomorphic());
        assert_eq!(f.meta().decay, Some(2.0));
    }

    #[test]
    fn log_oracle_order_zero_is_value() {
        let f = make_log_rho(&TubePoint::base(2)).unwrap();
        for w in sample_points() {
            let a = f.exact_l(&w, &MultiIndex::zeros(2)).unwrap();
            assert!((a - f.eval(&w)).norm() < 1e-15);
        }
    }
}
