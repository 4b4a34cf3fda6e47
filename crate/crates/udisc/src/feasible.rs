//! The feasible set `𝒮 = {p : X − diag(p) ⪰ 0, p ≥ 0}` and the critical
//! surface `σ_min(X − diag(p)) = 0` that carries every optimum.
//!
//! All quantities are computed from Hermitian eigen-solves of `X − Γ`:
//! principal minors and the determinant are eigenvalue products of the
//! corresponding submatrices, which keeps them real by construction.

use nalgebra::{DMatrix, DVector};

use crate::ensemble::GramMatrix;
use crate::C64;

/// Positive-semidefiniteness slack: `σ_min ≥ −TOL_PSD` counts as feasible.
pub const TOL_PSD: f64 = 1e-9;
/// `|σ_min| ≤ TOL_SURFACE` counts as lying on the critical surface.
pub const TOL_SURFACE: f64 = 1e-9;
/// Fixed bisection depth for [`ray_to_surface`]; the bracket shrinks by 2⁻⁸⁰.
const BISECTION_ITERS: usize = 80;

/// A point `p ∈ ℝⁿ` of per-state success probabilities.
///
/// This is a plain coordinate vector: points outside the feasible set are
/// representable on purpose (feasibility is a property checked by
/// [`check_feasible`], not an invariant of the type).
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessPoint(pub DVector<f64>);

impl SuccessPoint {
    pub fn from_slice(p: &[f64]) -> Self {
        Self(DVector::from_row_slice(p))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() == 0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    /// Average success probability `γ·p`.
    pub fn average(&self, priors: &DVector<f64>) -> f64 {
        self.0.dot(priors)
    }
}

/// Outcome of a feasibility check at a point.
#[derive(Debug, Clone, Copy)]
pub struct FeasibilityReport {
    /// `σ_min(X − Γ)`.
    pub sigma_min: f64,
    /// `min_i p_i`.
    pub gamma_min: f64,
    /// `sigma_min ≥ −TOL_PSD` and `gamma_min ≥ −TOL_PSD`.
    pub feasible: bool,
    /// Feasible and `|sigma_min| ≤ TOL_SURFACE`.
    pub on_critical_surface: bool,
}

/// `X − diag(p)`.
pub fn xg(x: &GramMatrix, p: &SuccessPoint) -> DMatrix<C64> {
    assert_eq!(x.n(), p.len(), "dimension mismatch");
    let mut m = x.entries().clone();
    for i in 0..p.len() {
        m[(i, i)] -= C64::new(p.0[i], 0.0);
    }
    m
}

fn eigenvalues(m: DMatrix<C64>) -> DVector<f64> {
    m.symmetric_eigenvalues()
}

/// Minimum eigenvalue `σ_min(X − diag(p))` from a Hermitian eigen-solve.
pub fn min_eigenvalue(x: &GramMatrix, p: &SuccessPoint) -> f64 {
    eigenvalues(xg(x, p)).fold(f64::INFINITY, |a, b| a.min(b))
}

pub fn check_feasible(x: &GramMatrix, p: &SuccessPoint) -> FeasibilityReport {
    let sigma_min = min_eigenvalue(x, p);
    let gamma_min = p.0.fold(f64::INFINITY, |a, b| a.min(b));
    let feasible = sigma_min >= -TOL_PSD && gamma_min >= -TOL_PSD;
    FeasibilityReport {
        sigma_min,
        gamma_min,
        feasible,
        on_critical_surface: feasible && sigma_min.abs() <= TOL_SURFACE,
    }
}

/// Principal minor `M_k(p)` of order `n−1`: the determinant of `X − Γ` with
/// row and column `k` deleted (`k` is 0-based).
pub fn principal_minor(x: &GramMatrix, p: &SuccessPoint, k: usize) -> f64 {
    let m = xg(x, p);
    let sub = m.remove_row(k).remove_column(k);
    if sub.nrows() == 0 {
        return 1.0;
    }
    eigenvalues(sub).iter().product()
}

/// All `n` principal minors at once.
pub fn all_minors(x: &GramMatrix, p: &SuccessPoint) -> DVector<f64> {
    DVector::from_iterator(x.n(), (0..x.n()).map(|k| principal_minor(x, p, k)))
}

/// `det(X − Γ)` as the product of eigenvalues.
pub fn det_xg(x: &GramMatrix, p: &SuccessPoint) -> f64 {
    eigenvalues(xg(x, p)).iter().product()
}

/// Hermitian Cholesky with a pivot-positivity check. `nalgebra`'s complex
/// `Cholesky` takes complex square roots of negative pivots instead of
/// failing, so the positive-definite test is done by hand. Reads the lower
/// triangle of `m`.
fn hermitian_is_pd(mut m: DMatrix<C64>) -> bool {
    let n = m.nrows();
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= m[(j, k)].norm_sqr();
        }
        if d.is_nan() || d <= 0.0 {
            return false;
        }
        let root = d.sqrt();
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= m[(i, k)] * m[(j, k)].conj();
            }
            m[(i, j)] = s / C64::new(root, 0.0);
        }
    }
    true
}

fn is_positive_definite(x: &GramMatrix, direction: &DVector<f64>, t: f64) -> bool {
    let mut m = x.entries().clone();
    for i in 0..direction.len() {
        m[(i, i)] -= C64::new(t * direction[i], 0.0);
    }
    hermitian_is_pd(m)
}

/// Projects a ray `t ↦ t·direction` from the origin onto the critical
/// surface: returns `p = t*·direction` with `σ_min(X − t*·diag(direction)) = 0`.
///
/// `σ_min` is non-increasing in `t` along the ray and crosses zero strictly,
/// so the crossing is found by bisection on the positive-definite predicate
/// (a Cholesky factorization attempt per step, [`BISECTION_ITERS`] steps).
/// The lower bracket `t = 0` is always feasible since `σ_min(X) > 0`.
///
/// Direction components must be non-negative and finite with at least one
/// strictly positive entry; zero components pin the corresponding `p_i` to 0.
pub fn ray_to_surface(x: &GramMatrix, direction: &DVector<f64>) -> SuccessPoint {
    assert_eq!(x.n(), direction.len(), "dimension mismatch");
    assert!(
        direction.iter().all(|d| d.is_finite() && *d >= 0.0) && direction.iter().any(|d| *d > 0.0),
        "direction must be non-negative with at least one positive component"
    );
    // Some p_i exceeds 1 at t_hi, making a diagonal entry of X − Γ negative,
    // so the upper bracket is strictly infeasible.
    let t_hi = direction
        .iter()
        .filter(|d| **d > 0.0)
        .map(|d| 1.0 / d)
        .fold(f64::INFINITY, f64::min)
        + 1.0;
    let (mut lo, mut hi) = (0.0f64, t_hi);
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if is_positive_definite(x, direction, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    SuccessPoint(direction * lo)
}
