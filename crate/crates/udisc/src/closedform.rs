//! Analytical machinery around the optimum.
//!
//! At an interior non-singular optimum the rank of `X − Γ` drops to `n−1` and
//! its unit null vector `u` has the fixed moduli `|u_k|² = γ_k`; the phases of
//! `u` reproduce the optimum via
//!
//! ```text
//! p_i = e^{-iθ_i} Σ_k e^{iθ_k} √(γ_k/γ_i) ⟨ψ_i|ψ_k⟩,
//! p̄  = ‖Σ_k √γ_k e^{iθ_k} |ψ_k⟩‖².
//! ```
//!
//! This module extracts and applies that representation, evaluates the star
//! (hub) configuration in closed form, solves the generalized
//! equal-probability measurement problem, and carries the three-state
//! analytical solvers (the degree-6 multiplier polynomial and its special
//! cases). The three-state solvers are accelerators: every result must pass
//! [`crate::solver::certify`] before being trusted.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

use crate::ensemble::{GramMatrix, StateEnsemble, TOL_RANK};
use crate::feasible::{all_minors, xg, SuccessPoint};
use crate::solver::{certify, Classification, OptimumSolution, SolverConfig, SolverError};
use crate::C64;

/// Tolerance on the null-vector modulus law `|u_k|² = γ_k`.
const MODULUS_TOL: f64 = 1e-6;
/// Eigenvalue threshold below which `X − Γ` is treated as rank-deficient
/// beyond `n−1` (i.e. not an interior non-singular optimum).
const RANK_TOL: f64 = 1e-6;
/// Largest imaginary part a reconstructed `p_i` may carry.
const IMAG_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum ClosedFormError {
    #[error("not an interior non-singular optimum: {0}")]
    NotInteriorOptimum(String),
    #[error("reconstructed p_{index} has imaginary part {imag:.3e}; phases are inconsistent")]
    ComplexResidue { index: usize, imag: f64 },
    #[error("ensemble does not have the required structure: {0}")]
    StructureMismatch(String),
    #[error("invalid weights: {0}")]
    WeightsInvalid(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
}

/// Phases of the null vector at an interior optimum, gauge-fixed to `θ₁ = 0`,
/// together with `ξ = √λ`.
#[derive(Debug, Clone)]
pub struct PhaseVector {
    pub thetas: DVector<f64>,
    pub xi: f64,
}

/// Result of evaluating the phase representation at given phases.
#[derive(Debug, Clone)]
pub struct PhaseReconstruction {
    pub point: SuccessPoint,
    pub p_bar: f64,
    /// Derivative of `‖Σ √γ_k e^{iθ_k}|ψ_k⟩‖²` with respect to each `θ_i`;
    /// vanishes at any stationary phase configuration, the optimum included.
    pub stationarity: DVector<f64>,
}

fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut a = a.rem_euclid(two_pi);
    if a > std::f64::consts::PI {
        a -= two_pi;
    }
    a
}

/// Extracts the phase representation from an interior non-singular optimum.
///
/// Computes the unit null vector `u` of `X − Γ_opt`, verifies the modulus law
/// `|u_k|² = γ_k`, and returns `θ_k = arg(u_k) − arg(u₁)` with `ξ = √λ`
/// (`λ` recovered as `Σ_k M_k(p_opt)`).
pub fn extract_phases(
    x: &GramMatrix,
    priors: &DVector<f64>,
    p_opt: &SuccessPoint,
) -> Result<PhaseVector, ClosedFormError> {
    let n = x.n();
    let eig = SymmetricEigen::new(xg(x, p_opt));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let sigma_min = eig.eigenvalues[order[0]];
    let sigma_next = eig.eigenvalues[order[1]];
    if sigma_min.abs() > RANK_TOL {
        return Err(ClosedFormError::NotInteriorOptimum(format!(
            "point is off the critical surface: sigma_min = {sigma_min:.3e}"
        )));
    }
    if sigma_next <= RANK_TOL {
        return Err(ClosedFormError::NotInteriorOptimum(format!(
            "rank of X - Gamma is below n-1: next eigenvalue {sigma_next:.3e}"
        )));
    }
    let u = eig.eigenvectors.column(order[0]);
    for k in 0..n {
        let dev = (u[k].norm_sqr() - priors[k]).abs();
        if dev > MODULUS_TOL {
            return Err(ClosedFormError::NotInteriorOptimum(format!(
                "null-vector modulus law fails at component {k}: ||u_k|^2 - gamma_k| = {dev:.3e}"
            )));
        }
    }
    let lambda: f64 = all_minors(x, p_opt).sum();
    if lambda <= 0.0 {
        return Err(ClosedFormError::NotInteriorOptimum(format!(
            "multiplier is not positive: lambda = {lambda:.3e}"
        )));
    }
    let base = u[0].arg();
    let thetas = DVector::from_iterator(
        n,
        (0..n).map(|k| if k == 0 { 0.0 } else { wrap_angle(u[k].arg() - base) }),
    );
    Ok(PhaseVector {
        thetas,
        xi: lambda.sqrt(),
    })
}

/// Evaluates the phase representation at the given phases.
///
/// Each `p_i` must come out real (within [`IMAG_TOL`]); a larger imaginary
/// residue means the phases are inconsistent and yields
/// [`ClosedFormError::ComplexResidue`]. The returned stationarity residuals
/// vanish at every stationary phase configuration, so a successful
/// reconstruction alone never certifies optimality: the caller must check the
/// point (e.g. `p̄ ∈ [0, 1]` and feasibility) or go through the solver.
pub fn reconstruct_from_phases(
    x: &GramMatrix,
    priors: &DVector<f64>,
    phases: &PhaseVector,
) -> Result<PhaseReconstruction, ClosedFormError> {
    let n = x.n();
    if priors.iter().any(|g| *g <= 0.0) {
        return Err(ClosedFormError::PreconditionFailed(
            "phase representation requires strictly positive priors".into(),
        ));
    }
    // z_i = Σ_k e^{iθ_k} √γ_k X_ik; then p_i = e^{-iθ_i} z_i / √γ_i and
    // p̄ = Σ_i √γ_i e^{-iθ_i} z_i.
    let weights: Vec<C64> = (0..n)
        .map(|k| C64::new(0.0, phases.thetas[k]).exp() * C64::new(priors[k].sqrt(), 0.0))
        .collect();
    let mut p = DVector::<f64>::zeros(n);
    let mut stationarity = DVector::<f64>::zeros(n);
    let mut p_bar = C64::new(0.0, 0.0);
    for i in 0..n {
        let z: C64 = weights
            .iter()
            .enumerate()
            .map(|(k, w)| x.entries()[(i, k)] * w)
            .sum();
        let rotated = C64::new(0.0, -phases.thetas[i]).exp() * z;
        p_bar += rotated * C64::new(priors[i].sqrt(), 0.0);
        stationarity[i] = 2.0 * priors[i].sqrt() * rotated.im;
        let pi = rotated / C64::new(priors[i].sqrt(), 0.0);
        if pi.im.abs() >= IMAG_TOL {
            return Err(ClosedFormError::ComplexResidue {
                index: i,
                imag: pi.im,
            });
        }
        p[i] = pi.re;
    }
    Ok(PhaseReconstruction {
        point: SuccessPoint(p),
        p_bar: p_bar.re,
        stationarity,
    })
}

/// Closed-form optimum for hub-structured ("star") ensembles: one state
/// overlaps all others, which are mutually orthogonal.
///
/// Detects the hub automatically. Returns `Ok(None)` when the closed form's
/// validity conditions fail (the optimum is then not interior and the caller
/// should fall back to the full solver); `StructureMismatch` when no hub
/// exists.
pub fn star_solution(
    ensemble: &StateEnsemble,
) -> Result<Option<OptimumSolution>, ClosedFormError> {
    let x = ensemble.gram();
    let priors = ensemble.priors();
    let n = x.n();

    let hub = (0..n).find(|&h| {
        let spokes_orthogonal = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && i != h && j != h)
            .all(|(i, j)| x.entries()[(i, j)].norm() < TOL_RANK);
        let hub_connected = (0..n)
            .filter(|&k| k != h)
            .all(|k| x.entries()[(h, k)].norm() > TOL_RANK);
        spokes_orthogonal && hub_connected
    });
    let Some(h) = hub else {
        return Err(ClosedFormError::StructureMismatch(
            "no hub state found: need one state overlapping all others, the rest mutually orthogonal"
                .into(),
        ));
    };

    if priors[h] <= 0.0 {
        return Ok(None);
    }
    // Validity: √(γ_k/γ_h) ≥ |⟨ψ_k|ψ_h⟩| per spoke and the hub success
    // probability must stay non-negative.
    let mut p = DVector::<f64>::zeros(n);
    let mut hub_sum = 0.0;
    for k in 0..n {
        if k == h {
            continue;
        }
        let overlap = x.entries()[(h, k)].norm();
        if priors[k] <= 0.0 || (priors[k] / priors[h]).sqrt() < overlap {
            return Ok(None);
        }
        p[k] = 1.0 - (priors[h] / priors[k]).sqrt() * overlap;
        hub_sum += (priors[k] / priors[h]).sqrt() * overlap;
    }
    if hub_sum > 1.0 {
        return Ok(None);
    }
    p[h] = 1.0 - hub_sum;

    let cfg = SolverConfig::default();
    if p.iter().any(|v| *v <= cfg.tol_cert) {
        // Valid only with equality; the optimum sits on the boundary and the
        // interior closed form does not apply.
        return Ok(None);
    }
    let point = SuccessPoint(p);
    let lambda: f64 = all_minors(&x, &point).sum();
    let p_bar = point.average(priors);
    let mut sol = OptimumSolution {
        p_opt: point,
        lambda,
        p_bar,
        classification: Classification::InteriorNonSingular,
        residuals: Default::default(),
    };
    match certify(&x, priors, &sol, &cfg) {
        Ok(residuals) => {
            sol.residuals = residuals;
            Ok(Some(sol))
        }
        Err(SolverError::CertificateViolation { .. }) => Ok(None),
        Err(e) => Err(ClosedFormError::PreconditionFailed(e.to_string())),
    }
}

/// Result of the generalized equal-probability measurement construction.
#[derive(Debug, Clone)]
pub struct GepmSolution {
    /// The optimum under the ratio constraint: `p_i = w_i σ_min(Ψ†Ψ)`.
    pub point: SuccessPoint,
    /// `σ_min(Ψ†Ψ)` for `Ψ` with columns `|ψ_i⟩/√w_i`.
    pub sigma_min: f64,
    /// Principal minors `M_i` at the constrained optimum.
    pub minors: DVector<f64>,
    /// The unique priors making this measurement globally optimal, or `None`
    /// when all minors vanish (singular case: a whole range of priors works).
    pub priors: Option<DVector<f64>>,
}

impl GepmSolution {
    pub fn is_singular(&self) -> bool {
        self.priors.is_none()
    }
}

/// Generalized equal-probability measurement: constrain `p ∝ w` and find the
/// priors for which that constraint is optimal.
///
/// The constrained optimum is `p_i = w_i σ_min(Ψ†Ψ)`; when some principal
/// minor is positive the priors are uniquely `γ_i = M_i / Σ_k M_k`.
/// Zero weights are rejected (the construction divides by `√w_i`).
pub fn gepm(ensemble: &StateEnsemble, weights: &DVector<f64>) -> Result<GepmSolution, ClosedFormError> {
    let x = ensemble.gram();
    let n = x.n();
    if weights.len() != n {
        return Err(ClosedFormError::WeightsInvalid(format!(
            "got {} weights for {n} states",
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w <= 0.0) {
        return Err(ClosedFormError::WeightsInvalid(format!(
            "weights must be strictly positive and finite, got {w}"
        )));
    }
    // Ψ†Ψ has entries X_ij / √(w_i w_j).
    let mut scaled = x.entries().clone();
    for i in 0..n {
        for j in 0..n {
            scaled[(i, j)] /= C64::new((weights[i] * weights[j]).sqrt(), 0.0);
        }
    }
    let sigma_min = scaled
        .symmetric_eigenvalues()
        .fold(f64::INFINITY, f64::min);
    let point = SuccessPoint(weights * sigma_min);
    let minors = all_minors(&x, &point);
    let tol = SolverConfig::default().tol_cert;
    let priors = if minors.iter().any(|m| *m > tol) {
        let total: f64 = minors.sum();
        Some(&minors / total)
    } else {
        None
    };
    Ok(GepmSolution {
        point,
        sigma_min,
        minors,
        priors,
    })
}

/// Scalar constants of the three-state problem.
#[derive(Debug, Clone)]
pub struct ThreeStateConstants {
    /// `γ₁γ₂γ₃`.
    pub gamma: f64,
    /// `T = ⟨ψ₁|ψ₂⟩⟨ψ₂|ψ₃⟩⟨ψ₃|ψ₁⟩`.
    pub t: C64,
    /// `R = γ₁γ₂|X₁₂|² + γ₂γ₃|X₂₃|² + γ₁γ₃|X₁₃|²`.
    pub r: f64,
    /// `S = γ₁|X₁₂|²|X₃₁|² + γ₂|X₁₂|²|X₂₃|² + γ₃|X₂₃|²|X₃₁|²`.
    pub s: f64,
    /// `Q = S² − 4R|T|²`.
    pub q: f64,
    /// `W = |X₁₂|² + |X₁₃|² + |X₂₃|²` (prior-free).
    pub w: f64,
    overlaps_sq: [f64; 3], // [|X₁₂|², |X₁₃|², |X₂₃|²]
    priors: [f64; 3],
}

impl ThreeStateConstants {
    pub fn new(x: &GramMatrix, priors: &DVector<f64>) -> Result<Self, ClosedFormError> {
        if x.n() != 3 || priors.len() != 3 {
            return Err(ClosedFormError::PreconditionFailed(format!(
                "three-state constants need n = 3, got n = {}",
                x.n()
            )));
        }
        let x12 = x.entries()[(0, 1)];
        let x13 = x.entries()[(0, 2)];
        let x23 = x.entries()[(1, 2)];
        let (a12, a13, a23) = (x12.norm_sqr(), x13.norm_sqr(), x23.norm_sqr());
        let t = x12 * x23 * x13.conj();
        let g = [priors[0], priors[1], priors[2]];
        let s = g[0] * a12 * a13 + g[1] * a12 * a23 + g[2] * a23 * a13;
        let r = g[0] * g[1] * a12 + g[1] * g[2] * a23 + g[0] * g[2] * a13;
        Ok(Self {
            gamma: g[0] * g[1] * g[2],
            t,
            r,
            s,
            q: s * s - 4.0 * r * t.norm_sqr(),
            w: a12 + a13 + a23,
            overlaps_sq: [a12, a13, a23],
            priors: g,
        })
    }

    /// The multiplier equation with the radical in place:
    /// `γλ³ − Sλ − 2|T|² + 2√(γλ³ + Rλ² + Sλ + |T|²)·Re(T)`.
    pub fn multiplier_equation(&self, lambda: f64) -> f64 {
        let t2 = self.t.norm_sqr();
        let radicand =
            self.gamma * lambda.powi(3) + self.r * lambda * lambda + self.s * lambda + t2;
        self.gamma * lambda.powi(3) - self.s * lambda - 2.0 * t2
            + 2.0 * radicand.max(0.0).sqrt() * self.t.re
    }

    fn multiplier_equation_derivative(&self, lambda: f64) -> f64 {
        let t2 = self.t.norm_sqr();
        let radicand =
            self.gamma * lambda.powi(3) + self.r * lambda * lambda + self.s * lambda + t2;
        let mut d = 3.0 * self.gamma * lambda * lambda - self.s;
        if radicand > 1e-300 {
            d += self.t.re * (3.0 * self.gamma * lambda * lambda + 2.0 * self.r * lambda + self.s)
                / radicand.sqrt();
        }
        d
    }
}

/// Real non-negative roots of a real polynomial given by descending
/// coefficients, via companion-matrix eigenvalues.
fn real_nonneg_roots(coeffs: &[f64]) -> Vec<f64> {
    let scale = coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    let lead = coeffs
        .iter()
        .position(|c| c.abs() > 1e-14 * scale)
        .unwrap_or(coeffs.len());
    let c = &coeffs[lead..];
    if c.len() <= 1 {
        return Vec::new();
    }
    let deg = c.len() - 1;
    let mut companion = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        companion[(i, deg - 1)] = -c[deg - i] / c[0];
    }
    // Double roots (an artifact of squaring the radical equation) split into
    // conjugate pairs with imaginary parts of order sqrt(machine epsilon), so
    // the imaginary filter is loose; the caller's polish-and-substitute-back
    // step discards anything that is not a genuine root.
    let eigs = companion.complex_eigenvalues();
    let mut roots: Vec<f64> = eigs
        .iter()
        .filter(|z| z.im.abs() <= 1e-6 * z.re.abs().max(1.0) && z.re >= -1e-10)
        .map(|z| z.re.max(0.0))
        .collect();
    roots.sort_by(f64::total_cmp);
    roots
}

/// All real `λ ≥ 0` candidates of the three-state multiplier equation.
///
/// The radical is isolated and squared, giving a degree-6 polynomial whose
/// real non-negative roots are found by companion-matrix eigenvalues; each is
/// polished with two Newton steps on the original radical equation and kept
/// only if it actually solves it (residual ≤ 1e-8), which discards the
/// squaring artifacts. Candidates are returned sorted ascending.
pub fn three_state_lambda_poly(c: &ThreeStateConstants) -> Vec<f64> {
    let t2 = c.t.norm_sqr();
    let re2 = c.t.re * c.t.re;
    // (γλ³ − Sλ − 2|T|²)² − 4Re(T)²(γλ³ + Rλ² + Sλ + |T|²), descending.
    let coeffs = [
        c.gamma * c.gamma,
        0.0,
        -2.0 * c.gamma * c.s,
        -4.0 * c.gamma * (t2 + re2),
        c.s * c.s - 4.0 * c.r * re2,
        4.0 * c.s * (t2 - re2),
        4.0 * t2 * (t2 - re2),
    ];
    let zero_is_root = c.multiplier_equation(0.0).abs() <= 1e-8;
    let mut out = Vec::new();
    for root in real_nonneg_roots(&coeffs) {
        let mut lam = root;
        for _ in 0..2 {
            let d = c.multiplier_equation_derivative(lam);
            if d.abs() < 1e-14 {
                break;
            }
            lam -= c.multiplier_equation(lam) / d;
        }
        let mut lam = lam.max(0.0);
        // A zero root doubled by the squaring comes back as ~sqrt(eps) and
        // sits where the radical equation's derivative vanishes, out of
        // Newton's reach; collapse it onto the exact root.
        if lam < 1e-7 && zero_is_root {
            lam = 0.0;
        }
        if c.multiplier_equation(lam).abs() <= 1e-8
            && out.iter().all(|x: &f64| (x - lam).abs() > 1e-9)
        {
            out.push(lam);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Closed-form multiplier for the purely imaginary overlap product
/// (`Re T = 0`, `T ≠ 0`): the unique positive root
/// `λ = 2√(S/3γ)·cos(θ/3)` with `θ = arccos((|T|²/S)√(27γ/S))`.
pub fn three_state_case2(c: &ThreeStateConstants) -> Result<f64, ClosedFormError> {
    if c.t.re.abs() > 1e-12 {
        return Err(ClosedFormError::PreconditionFailed(format!(
            "Re(T) = {:.3e} is not zero",
            c.t.re
        )));
    }
    if c.t.norm() == 0.0 {
        return Err(ClosedFormError::PreconditionFailed(
            "T = 0 (some overlap vanishes); use the hub/star route".into(),
        ));
    }
    if c.s <= 0.0 || c.gamma <= 0.0 {
        return Err(ClosedFormError::PreconditionFailed(
            "degenerate constants (S = 0 or zero prior); use the hub/star route".into(),
        ));
    }
    // S³ ≥ 27γ|T|⁴ keeps the arccos argument within [-1, 1].
    let arg = c.t.norm_sqr() / c.s * (27.0 * c.gamma / c.s).sqrt();
    assert!(
        arg <= 1.0 + 1e-9,
        "mean inequality S^3 >= 27*gamma*|T|^4 violated: arg = {arg}"
    );
    let theta = arg.clamp(-1.0, 1.0).acos();
    Ok(2.0 * (c.s / (3.0 * c.gamma)).sqrt() * (theta / 3.0).cos())
}

/// Expands a multiplier candidate into a success point via
/// `(1−p_i)² = (|X_jk|² + λγ_j)(|X_ji|²-type factors)`; `None` when a
/// denominator degenerates (two vanishing overlaps at `λ = 0`).
pub fn three_state_expand(c: &ThreeStateConstants, lambda: f64) -> Option<SuccessPoint> {
    if lambda < 0.0 {
        return None;
    }
    let [a12, a13, a23] = c.overlaps_sq;
    let [g1, g2, g3] = c.priors;
    let f1 = a23 + lambda * g1;
    let f2 = a13 + lambda * g2;
    let f3 = a12 + lambda * g3;
    if f1 <= 1e-300 || f2 <= 1e-300 || f3 <= 1e-300 {
        return None;
    }
    let q1 = 1.0 - (f3 * f2 / f1).sqrt();
    let q2 = 1.0 - (f1 * f3 / f2).sqrt();
    let q3 = 1.0 - (f1 * f2 / f3).sqrt();
    Some(SuccessPoint::from_slice(&[q1, q2, q3]))
}

/// Equal-probability measurement for three states.
#[derive(Debug, Clone)]
pub struct ThreeStateEpm {
    /// Common success probability `p₁ = p₂ = p₃`.
    pub p_epm: f64,
    /// Priors for which the EPM is optimal; `None` when the EPM point is
    /// singular (then a whole range of priors shares it).
    pub priors: Option<[f64; 3]>,
}

/// Closed-form equal-probability measurement:
/// `p_EPM = 1 − 2√(W/3)·cos(π/3 − θ/3)` with
/// `θ = arccos(3√3·Re(T)/W^{3/2})`, and the matching priors unless their
/// common denominator vanishes (singular case).
pub fn three_state_epm(x: &GramMatrix) -> Result<ThreeStateEpm, ClosedFormError> {
    if x.n() != 3 {
        return Err(ClosedFormError::PreconditionFailed(format!(
            "EPM closed form needs n = 3, got n = {}",
            x.n()
        )));
    }
    let x12 = x.entries()[(0, 1)];
    let x13 = x.entries()[(0, 2)];
    let x23 = x.entries()[(1, 2)];
    let (a12, a13, a23) = (x12.norm_sqr(), x13.norm_sqr(), x23.norm_sqr());
    let w = a12 + a13 + a23;
    if w < 1e-14 {
        // Orthogonal states: every outcome succeeds with certainty.
        return Ok(ThreeStateEpm {
            p_epm: 1.0,
            priors: None,
        });
    }
    let t = x12 * x23 * x13.conj();
    let mut arg = 3.0 * 3.0f64.sqrt() * t.re / (w * w.sqrt());
    assert!(arg.abs() <= 1.0 + 1e-9, "27 Re(T)^2 <= W^3 violated: {arg}");
    // arccos is infinitely steep at 1, so roundoff in a degenerate arg would
    // smear the singular case (equal overlap moduli, θ = 0) by ~1e-9 in
    // p_EPM; pin it instead.
    if arg >= 1.0 - 1e-12 {
        arg = 1.0;
    }
    let theta = arg.clamp(-1.0, 1.0).acos();
    let cosine = (std::f64::consts::FRAC_PI_3 - theta / 3.0).cos();
    let p_epm = 1.0 - 2.0 * (w / 3.0).sqrt() * cosine;
    let denom = 4.0 * w * cosine * cosine - w;
    let priors = if denom.abs() <= 1e-6 {
        None
    } else {
        let num = |overlap_sq: f64| (4.0 / 3.0 * w * cosine * cosine - overlap_sq) / denom;
        Some([num(a23), num(a13), num(a12)])
    };
    Ok(ThreeStateEpm { p_epm, priors })
}
