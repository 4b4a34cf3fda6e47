//! Materialized measurement operators and Monte Carlo simulation.
//!
//! The conclusive elements are rank-1: `Π_i = p_i |ψ̃_i⟩⟨ψ̃_i|` built from the
//! dual states; the inconclusive element completes them to the projector onto
//! the states' span, `Π₀ = P_span − Σ Π_i`. Restricting to the span follows
//! the problem setup: outcomes outside it never occur for inputs in the span.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensemble::StateEnsemble;
use crate::feasible::{check_feasible, SuccessPoint, TOL_PSD};
use crate::C64;

#[derive(Debug, Error)]
pub enum PovmError {
    #[error("infeasible success point: sigma_min(X - Gamma) = {sigma_min:.3e}, min p_i = {p_min:.3e}")]
    InfeasiblePoint { sigma_min: f64, p_min: f64 },
    #[error("dimension mismatch: point has {got} components for {expected} states")]
    DimensionMismatch { got: usize, expected: usize },
}

/// A complete unambiguous-discrimination POVM on the span of the states,
/// embedded in the ambient dimension `d`.
#[derive(Debug, Clone)]
pub struct PovmSet {
    /// Rank-1 conclusive elements `Π₁ … Πₙ` (`d × d`).
    elements: Vec<DMatrix<C64>>,
    /// Inconclusive element `Π₀` (`d × d`).
    inconclusive: DMatrix<C64>,
    /// Projector onto the span of the states.
    span_projector: DMatrix<C64>,
}

/// Residuals of the POVM axioms, computed on every build.
#[derive(Debug, Clone, Copy)]
pub struct PovmCertificates {
    /// `max |(Π₀ + Σ Π_i − P_span)_{jk}|`.
    pub completeness: f64,
    /// Smallest eigenvalue over all conclusive elements.
    pub min_eigenvalue_elements: f64,
    /// Smallest eigenvalue of `Π₀`.
    pub min_eigenvalue_inconclusive: f64,
}

impl PovmSet {
    pub fn n(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: usize) -> &DMatrix<C64> {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[DMatrix<C64>] {
        &self.elements
    }

    pub fn inconclusive(&self) -> &DMatrix<C64> {
        &self.inconclusive
    }

    pub fn span_projector(&self) -> &DMatrix<C64> {
        &self.span_projector
    }

    /// Inconclusive element embedded in the full ambient dimension:
    /// `Π₀ + (I − P_span)`, so the POVM completes to the ambient identity.
    /// Outcomes outside the span never occur for inputs in the span, which is
    /// why [`PovmSet::inconclusive`] is kept span-restricted by default.
    pub fn ambient_inconclusive(&self) -> DMatrix<C64> {
        let d = self.inconclusive.nrows();
        &self.inconclusive + DMatrix::<C64>::identity(d, d) - &self.span_projector
    }

    /// Recomputes the axiom residuals: completeness against the span
    /// projector and positivity of every element.
    pub fn certificates(&self) -> PovmCertificates {
        let mut sum = self.inconclusive.clone();
        for e in &self.elements {
            sum += e;
        }
        sum -= &self.span_projector;
        let completeness = sum.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let min_eig = |m: &DMatrix<C64>| {
            m.clone()
                .symmetric_eigenvalues()
                .fold(f64::INFINITY, f64::min)
        };
        PovmCertificates {
            completeness,
            min_eigenvalue_elements: self
                .elements
                .iter()
                .map(min_eig)
                .fold(f64::INFINITY, f64::min),
            min_eigenvalue_inconclusive: min_eig(&self.inconclusive),
        }
    }
}

/// Builds the POVM realizing the success probabilities `p`.
///
/// Fails with [`PovmError::InfeasiblePoint`] when `p` is infeasible, which is
/// exactly the case where `Π₀` would be indefinite.
pub fn build_povm(ensemble: &StateEnsemble, p: &SuccessPoint) -> Result<PovmSet, PovmError> {
    let n = ensemble.n();
    if p.len() != n {
        return Err(PovmError::DimensionMismatch {
            got: p.len(),
            expected: n,
        });
    }
    let x = ensemble.gram();
    let report = check_feasible(&x, p);
    if !report.feasible {
        return Err(PovmError::InfeasiblePoint {
            sigma_min: report.sigma_min,
            p_min: report.gamma_min,
        });
    }

    let duals = ensemble.dual_states();
    let elements: Vec<DMatrix<C64>> = (0..n)
        .map(|i| {
            let d = duals.dual(i);
            let outer = &d * d.adjoint();
            outer * C64::new(p.0[i], 0.0)
        })
        .collect();
    // P_span = Φ̃Φ† = Φ(Φ†Φ)⁻¹Φ†; hermitize against rounding.
    let span = duals.columns() * ensemble.states().adjoint();
    let span = (&span + span.adjoint()) * C64::new(0.5, 0.0);
    let mut inconclusive = span.clone();
    for e in &elements {
        inconclusive -= e;
    }
    let inconclusive = (&inconclusive + inconclusive.adjoint()) * C64::new(0.5, 0.0);
    Ok(PovmSet {
        elements,
        inconclusive,
        span_projector: span,
    })
}

/// Outcome distribution for prepared state `i`: the first `n` entries are the
/// conclusive outcomes `p(j|i) = ⟨ψ_i|Π_j|ψ_i⟩`, the last entry is the
/// inconclusive outcome. Sub-machine-precision negative noise is clamped.
pub fn outcome_distribution(
    povm: &PovmSet,
    ensemble: &StateEnsemble,
    prepared: usize,
) -> DVector<f64> {
    let n = povm.n();
    assert!(prepared < n, "prepared index out of range");
    let psi = ensemble.states().column(prepared);
    let mut probs = DVector::zeros(n + 1);
    for j in 0..n {
        probs[j] = (psi.adjoint() * povm.element(j) * psi)[(0, 0)].re;
    }
    probs[n] = (psi.adjoint() * povm.inconclusive() * psi)[(0, 0)].re;
    for v in probs.iter_mut() {
        debug_assert!(*v >= -TOL_PSD, "outcome probability {v} below -TOL_PSD");
        *v = v.max(0.0);
    }
    probs
}

/// Counts from a simulated discrimination experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub trials: u64,
    pub seed: u64,
    /// `counts[i][j]`: prepared state `i`, outcome `j` (`j = n` inconclusive).
    pub counts: Vec<Vec<u64>>,
    /// Fraction of trials with the correct conclusive outcome.
    pub empirical_success: f64,
    /// Fraction of trials with a wrong conclusive outcome (must be zero for a
    /// valid unambiguous measurement).
    pub empirical_error: f64,
}

/// Samples `trials` preparations from the priors and outcomes from the POVM
/// statistics by inverse-CDF. Deterministic for a fixed seed; the PRNG is
/// ChaCha8 seeded with `seed`.
pub fn simulate(
    povm: &PovmSet,
    ensemble: &StateEnsemble,
    trials: u64,
    seed: u64,
) -> SimulationReport {
    let n = povm.n();
    let prior_cdf: Vec<f64> = ensemble
        .priors()
        .iter()
        .scan(0.0, |acc, g| {
            *acc += g;
            Some(*acc)
        })
        .collect();
    let outcome_cdfs: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let dist = outcome_distribution(povm, ensemble, i);
            let total: f64 = dist.sum();
            dist.iter()
                .scan(0.0, |acc, q| {
                    *acc += q / total;
                    Some(*acc)
                })
                .collect()
        })
        .collect();

    let pick = |cdf: &[f64], r: f64| cdf.iter().position(|c| r < *c).unwrap_or(cdf.len() - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![vec![0u64; n + 1]; n];
    for _ in 0..trials {
        let prepared = pick(&prior_cdf, rng.random::<f64>());
        let outcome = pick(&outcome_cdfs[prepared], rng.random::<f64>());
        counts[prepared][outcome] += 1;
    }

    let mut success = 0u64;
    let mut error = 0u64;
    for (i, row) in counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if j == i {
                success += c;
            } else if j < n {
                error += c;
            }
        }
    }
    SimulationReport {
        trials,
        seed,
        counts,
        empirical_success: success as f64 / trials as f64,
        empirical_error: error as f64 / trials as f64,
    }
}
