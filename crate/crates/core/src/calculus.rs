//! Holomorphic derivatives by Cauchy contour sums, the operators L^γ, the invariant gradient
//! and Laplacian, and the Bergman matrix.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::TubePoint;
use crate::error::{Result, TubeError};
use crate::functions::FunctionHandle;

const CONTOUR_NODES: usize = 32;
const MAX_ORDER: u32 = 4;
const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A multi-index γ = (γ_1, ..., γ_n).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    gamma: Vec<u32>,
}

impl MultiIndex {
    pub fn new(gamma: Vec<u32>) -> Self {
        assert!(!gamma.is_empty(), "multi-index needs at least one entry");
        Self { gamma }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![0; n])
    }

    /// e_k (0-based k).
    pub fn unit(n: usize, k: usize) -> Self {
        let mut g = vec![0; n];
        g[k] = 1;
        Self::new(g)
    }

    /// γ_n · e_n.
    pub fn last_power(n: usize, order: u32) -> Self {
        let mut g = vec![0; n];
        g[n - 1] = order;
        Self::new(g)
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn get(&self, k: usize) -> u32 {
        self.gamma[k]
    }

    pub fn entries(&self) -> &[u32] {
        &self.gamma
    }

    pub fn last(&self) -> u32 {
        self.gamma[self.gamma.len() - 1]
    }

    /// |γ|.
    pub fn order(&self) -> u32 {
        self.gamma.iter().sum()
    }

    /// |γ'|.
    pub fn prime_order(&self) -> u32 {
        self.order() - self.last()
    }

    /// ⟨γ⟩ = γ_n + |γ'|/2.
    pub fn weighted_order(&self) -> f64 {
        f64::from(self.last()) + f64::from(self.prime_order()) / 2.0
    }

    fn bumped(&self, k: usize) -> Self {
        let mut g = self.gamma.clone();
        g[k] += 1;
        Self { gamma: g }
    }

    fn factorial(&self) -> f64 {
        self.gamma
            .iter()
            .map(|&g| (1..=g).map(f64::from).product::<f64>())
            .product()
    }
}

/// Polydisc radii for the active coordinates of γ: ρ/4 for z_n and √(y_j² + ρ/4) - |y_j| for
/// z_j, with the ρ/4 budget shrunk by min(1, 3/d) when d coordinates move at once.
fn contour_radii(z: &TubePoint, gamma: &MultiIndex) -> Result<Vec<f64>> {
    let rho = z.defect();
    let n = z.dim();
    let active = gamma.entries().iter().filter(|&&g| g > 0).count().max(1);
    let budget = rho / 4.0 * (3.0 / active as f64).min(1.0);
    let radii: Vec<f64> = (0..n)
        .map(|k| {
            if k == n - 1 {
                budget
            } else {
                let y = z.coords()[k].im.abs();
                // difference of squares, written to avoid cancellation for large |y|
                budget / ((y * y + budget).sqrt() + y)
            }
        })
        .collect();
    if radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(TubeError::ContourEscapesDomain);
    }
    Ok(radii)
}

/// ∂^γ f(z) for holomorphic f, via the trapezoidal rule on a torus of 32 nodes per active
/// coordinate.
pub fn holo_derivative(f: &FunctionHandle, z: &TubePoint, gamma: &MultiIndex) -> Result<Complex64> {
    z.require_interior()?;
    if gamma.dim() != z.dim() {
        return Err(TubeError::DimensionMismatch {
            expected: z.dim(),
            found: gamma.dim(),
        });
    }
    if gamma.order() > MAX_ORDER {
        return Err(TubeError::OrderTooHigh(gamma.order()));
    }
    if gamma.order() == 0 {
        let v = f.eval(z);
        return if v.is_finite() {
            Ok(v)
        } else {
            Err(TubeError::NonFinite("holo_derivative"))
        };
    }
    let radii = contour_radii(z, gamma)?;
    let active: Vec<usize> = (0..z.dim()).filter(|&k| gamma.get(k) > 0).collect();
    let nodes: Vec<Complex64> = (0..CONTOUR_NODES)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / CONTOUR_NODES as f64))
        .collect();
    let d = active.len();
    let total = CONTOUR_NODES.pow(d as u32);
    let mut sum = ZERO;
    let mut idx = vec![0usize; d];
    for _ in 0..total {
        let mut coords = z.coords().to_vec();
        let mut weight = Complex64::new(1.0, 0.0);
        for (slot, &k) in active.iter().enumerate() {
            let w = nodes[idx[slot]];
            coords[k] += radii[k] * w;
            // e^{-iγ_kθ}
            weight *= w.conj().powi(gamma.get(k) as i32);
        }
        let v = f.eval(&TubePoint::new(coords)?);
        if !v.is_finite() {
            return Err(TubeError::NonFinite("holo_derivative"));
        }
        sum += v * weight;
        for slot in 0..d {
            idx[slot] += 1;
            if idx[slot] < CONTOUR_NODES {
                break;
            }
            idx[slot] = 0;
        }
    }
    let scale: f64 = active
        .iter()
        .map(|&k| radii[k].powi(gamma.get(k) as i32))
        .product();
    Ok(sum * (gamma.factorial() / (scale * total as f64)))
}

/// All first partials ∂f/∂z_k.
pub fn holo_gradient(f: &FunctionHandle, z: &TubePoint) -> Result<Vec<Complex64>> {
    (0..z.dim())
        .map(|k| holo_derivative(f, z, &MultiIndex::unit(z.dim(), k)))
        .collect()
}

/// Polynomial in y' with complex coefficients, keyed by exponent vectors.
type Poly = BTreeMap<Vec<u32>, Complex64>;

/// L^γ written as Σ_β P_β(y') ∂^β.
#[derive(Clone, Debug, PartialEq)]
pub struct LExpansion {
    terms: BTreeMap<MultiIndex, Poly>,
}

impl LExpansion {
    /// Expands L_1^{γ_1} ... L_n^{γ_n}, applying the rightmost factor first.
    pub fn new(gamma: &MultiIndex) -> Self {
        let n = gamma.dim();
        let mut poly = Poly::new();
        poly.insert(vec![0; n - 1], Complex64::new(1.0, 0.0));
        let mut terms = BTreeMap::new();
        terms.insert(MultiIndex::zeros(n), poly);
        let mut e = Self { terms };
        for k in (0..n).rev() {
            for _ in 0..gamma.get(k) {
                e = e.apply(k);
            }
        }
        e
    }

    /// L_k ∘ self. For k < n-1: L_k(P ∂^β) = (∂P/∂y_k)(-i/2) ∂^β + P ∂^{β+e_k} + 2y_k P ∂^{β+e_n}.
    fn apply(&self, k: usize) -> Self {
        let mut out: BTreeMap<MultiIndex, Poly> = BTreeMap::new();
        let last = self.terms.keys().next().map(|b| b.dim() - 1).unwrap_or(0);
        let mut push = |beta: MultiIndex, exps: Vec<u32>, c: Complex64| {
            *out.entry(beta).or_default().entry(exps).or_insert(ZERO) += c;
        };
        for (beta, poly) in &self.terms {
            for (exps, &c) in poly {
                if k == last {
                    push(beta.bumped(last), exps.clone(), c);
                    continue;
                }
                if exps[k] > 0 {
                    let mut e = exps.clone();
                    e[k] -= 1;
                    push(beta.clone(), e, c * f64::from(exps[k]) * (-0.5 * I));
                }
                push(beta.bumped(k), exps.clone(), c);
                let mut e = exps.clone();
                e[k] += 1;
                push(beta.bumped(last), e, 2.0 * c);
            }
        }
        for poly in out.values_mut() {
            poly.retain(|_, c| *c != ZERO);
        }
        out.retain(|_, p| !p.is_empty());
        Self { terms: out }
    }

    /// Coefficient P_β evaluated at y'.
    pub fn coefficient(&self, beta: &MultiIndex, y_prime: &[f64]) -> Complex64 {
        self.terms.get(beta).map_or(ZERO, |p| eval_poly(p, y_prime))
    }

    pub fn indices(&self) -> impl Iterator<Item = &MultiIndex> {
        self.terms.keys()
    }
}

fn eval_poly(p: &Poly, y: &[f64]) -> Complex64 {
    p.iter()
        .map(|(e, &c)| {
            c * e
                .iter()
                .zip(y)
                .map(|(&k, &v)| v.powi(k as i32))
                .product::<f64>()
        })
        .sum()
}

/// L^γ f(z) = L_1^{γ_1} ... L_n^{γ_n} f(z), with L_n = ∂/∂z_n and L_j = ∂/∂z_j + 2y_j ∂/∂z_n.
pub fn lop(f: &FunctionHandle, z: &TubePoint, gamma: &MultiIndex) -> Result<Complex64> {
    if gamma.dim() != z.dim() {
        return Err(TubeError::DimensionMismatch {
            expected: z.dim(),
            found: gamma.dim(),
        });
    }
    if gamma.order() > MAX_ORDER {
        return Err(TubeError::OrderTooHigh(gamma.order()));
    }
    let expansion = LExpansion::new(gamma);
    let y: Vec<f64> = z.prime().iter().map(|c| c.im).collect();
    let mut acc = ZERO;
    for beta in expansion.indices() {
        let c = expansion.coefficient(beta, &y);
        if c != ZERO {
            acc += c * holo_derivative(f, z, beta)?;
        }
    }
    Ok(acc)
}

/// |∇̃f(z)| = (4ρ(2ρ|L_n f|² + Σ_j |L_j f|²))^{1/2}.
pub fn invariant_gradient_norm(f: &FunctionHandle, z: &TubePoint) -> Result<f64> {
    let grad = holo_gradient(f, z)?;
    Ok(invariant_gradient_from(z, &grad))
}

/// |∇̃f(z)| from the holomorphic gradient at z.
pub fn invariant_gradient_from(z: &TubePoint, grad: &[Complex64]) -> f64 {
    let rho = z.defect();
    let n = z.dim();
    let dn = grad[n - 1];
    let mut s = 2.0 * rho * dn.norm_sqr();
    for (j, zj) in z.prime().iter().enumerate() {
        s += (grad[j] + 2.0 * zj.im * dn).norm_sqr();
    }
    (4.0 * rho * s).sqrt()
}

/// Real Hessian of g at z in the coordinates (x_1, y_1, ..., x_n, y_n), central differences
/// with one Richardson step.
fn real_hessian(g: &FunctionHandle, z: &TubePoint, h: f64) -> Result<Vec<Vec<Complex64>>> {
    let n = z.dim();
    let dims = 2 * n;
    let direction = |a: usize| -> Complex64 {
        if a % 2 == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            I
        }
    };
    let eval = |shifts: &[(usize, f64)]| -> Result<Complex64> {
        let mut coords = z.coords().to_vec();
        for &(a, s) in shifts {
            coords[a / 2] += direction(a) * s;
        }
        let p = TubePoint::new(coords)?;
        if !p.is_interior() {
            return Err(TubeError::StepTooSmall {
                step: h,
                defect: z.defect(),
            });
        }
        let v = g.eval(&p);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(TubeError::NonFinite("invariant_laplacian"))
        }
    };
    let center = eval(&[])?;
    let second = |a: usize, b: usize, s: f64| -> Result<Complex64> {
        if a == b {
            Ok((eval(&[(a, s)])? - 2.0 * center + eval(&[(a, -s)])?) / (s * s))
        } else {
            let pp = eval(&[(a, s), (b, s)])?;
            let pm = eval(&[(a, s), (b, -s)])?;
            let mp = eval(&[(a, -s), (b, s)])?;
            let mm = eval(&[(a, -s), (b, -s)])?;
            Ok((pp - pm - mp + mm) / (4.0 * s * s))
        }
    };
    let mut hess = vec![vec![ZERO; dims]; dims];
    for a in 0..dims {
        for b in a..dims {
            let fine = second(a, b, h)?;
            let coarse = second(a, b, 2.0 * h)?;
            let v = (4.0 * fine - coarse) / 3.0;
            hess[a][b] = v;
            hess[b][a] = v;
        }
    }
    Ok(hess)
}

/// Δ̃g(z) = 4 Σ b^{ij}(z) ∂²g/∂z̄_i∂z_j for a C² function g, by finite differences with step
/// h = max(1e-5, 1e-3 ρ(z)).
pub fn invariant_laplacian(g: &FunctionHandle, z: &TubePoint) -> Result<Complex64> {
    z.require_interior()?;
    let rho = z.defect();
    let h = (1e-3 * rho).max(1e-5);
    if h > rho / 8.0 {
        return Err(TubeError::StepTooSmall {
            step: h,
            defect: rho,
        });
    }
    let hess = real_hessian(g, z, h)?;
    // ∂²/∂z̄_i∂z_j = ¼(∂x_i∂x_j + ∂y_i∂y_j + i(∂x_i∂y_j - ∂y_i∂x_j))
    let wirtinger = |i: usize, j: usize| -> Complex64 {
        let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        0.25 * (hess[xi][xj] + hess[yi][yj] + I * (hess[xi][yj] - hess[yi][xj]))
    };
    let b = bergman_matrix(z)?;
    let n = z.dim();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            let c = b.inverse[i][j];
            if c != 0.0 {
                acc += c * wirtinger(i, j);
            }
        }
    }
    Ok(4.0 * acc)
}

/// Bergman matrix b_{ij}(z), its inverse b^{ij}(z) and determinant b(z) = 1/(2ρ)^{n+1}.
/// All entries are real.
#[derive(Clone, Debug, PartialEq)]
pub struct BergmanMatrix {
    pub entries: Vec<Vec<f64>>,
    pub inverse: Vec<Vec<f64>>,
    pub det: f64,
}

impl BergmanMatrix {
    /// 2 Σ b^{ij} conj(∂_i f) ∂_j f, equal to |∇̃f|².
    pub fn gradient_norm_sq(&self, grad: &[Complex64]) -> f64 {
        let mut acc = ZERO;
        for (i, row) in self.inverse.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                acc += b * grad[i].conj() * grad[j];
            }
        }
        2.0 * acc.re
    }
}

/// b^{ij} = ρ[[2I, 4y'], [4y'ᵀ, 4(y_n + |y'|²)]] and b_{ij} = [[½ρI + y'y'ᵀ, -½y'], [-½y'ᵀ, ¼]]/ρ².
pub fn bergman_matrix(z: &TubePoint) -> Result<BergmanMatrix> {
    z.require_interior()?;
    let n = z.dim();
    let rho = z.defect();
    let y: Vec<f64> = z.prime().iter().map(|c| c.im).collect();
    let yn = z.last().im;
    let y_sq: f64 = y.iter().map(|v| v * v).sum();
    let mut inverse = vec![vec![0.0; n]; n];
    let mut entries = vec![vec![0.0; n]; n];
    for j in 0..n - 1 {
        inverse[j][j] = 2.0 * rho;
        inverse[j][n - 1] = 4.0 * rho * y[j];
        inverse[n - 1][j] = 4.0 * rho * y[j];
        for k in 0..n - 1 {
            entries[j][k] = (if j == k { 0.5 * rho } else { 0.0 } + y[j] * y[k]) / (rho * rho);
        }
        entries[j][n - 1] = -0.5 * y[j] / (rho * rho);
        entries[n - 1][j] = entries[j][n - 1];
    }
    inverse[n - 1][n - 1] = 4.0 * rho * (yn + y_sq);
    entries[n - 1][n - 1] = 0.25 / (rho * rho);
    let det = determinant(&entries);
    Ok(BergmanMatrix {
        entries,
        inverse,
        det,
    })
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
        }
    }
    det
}

/// Complex determinant by Gaussian elimination with partial pivoting.
pub fn complex_determinant(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    let mut a: Vec<Vec<Complex64>> = m.to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap_or(col);
        if a[pivot][col] == ZERO {
            return ZERO;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                let sub = factor * a[col][k];
                a[row][k] -= sub;
            }
        }
    }
    det
}

/// Real 2n×2n Jacobian of a map C^n → C^n by central differences with step h, in the
/// ordering (Re z_1, Im z_1, ..., Re z_n, Im z_n).
pub fn fd_real_jacobian<M>(map: M, x: &[Complex64], h: f64) -> Result<Vec<Vec<f64>>>
where
    M: Fn(&[Complex64]) -> Result<Vec<Complex64>>,
{
    let n = x.len();
    let mut jac = vec![vec![0.0; 2 * n]; 2 * n];
    for col in 0..2 * n {
        let step = if col % 2 == 0 {
            Complex64::new(h, 0.0)
        } else {
            Complex64::new(0.0, h)
        };
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        plus[col / 2] += step;
        minus[col / 2] -= step;
        let (fp, fm) = (map(&plus)?, map(&minus)?);
        for k in 0..n {
            let d = (fp[k] - fm[k]) / (2.0 * h);
            jac[2 * k][col] = d.re;
            jac[2 * k + 1][col] = d.im;
        }
    }
    Ok(jac)
}

/// Complex Jacobian ∂F_k/∂z_j of a holomorphic map by central differences along Re z_j.
pub fn fd_complex_jacobian<M>(map: M, x: &[Complex64], h: f64) -> Result<Vec<Vec<Complex64>>>
where
    M: Fn(&[Complex64]) -> Result<Vec<Complex64>>,
{
    let n = x.len();
    let mut jac = vec![vec![ZERO; n]; n];
    for j in 0..n {
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        plus[j] += h;
        minus[j] -= h;
        let (fp, fm) = (map(&plus)?, map(&minus)?);
        for k in 0..n {
            jac[k][j] = (fp[k] - fm[k]) / (2.0 * h);
        }
    }
    Ok(jac)
}
