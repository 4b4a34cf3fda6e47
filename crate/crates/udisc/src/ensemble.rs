//! Input types, validation, Gram matrix and dual (reciprocal) states.
//!
//! A [`StateEnsemble`] holds `n` unit vectors in dimension `d ≥ n` together
//! with prior probabilities. Everything downstream works on the Gram matrix
//! `X = Φ†Φ`; the states themselves are only needed again when the
//! measurement operators are materialized from the dual states
//! `Φ̃ = Φ(Φ†Φ)⁻¹`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

use crate::C64;

/// Tolerance on state norms and the prior sum during validation.
pub const TOL_NORM: f64 = 1e-6;
/// Linear-independence cutoff on `det(X)`.
pub const TOL_RANK: f64 = 1e-10;
/// Residual tolerance for linear solves (biorthogonality of dual states).
pub const TOL_SOLVE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("state {index} has norm {norm} (must be within {TOL_NORM:e} of 1)")]
    NotNormalized { index: usize, norm: f64 },
    #[error("priors invalid: {0}")]
    PriorsInvalid(String),
    #[error("states are linearly dependent: det(X) = {0:.3e}")]
    LinearlyDependent(f64),
    #[error("matrix is not a valid Gram matrix: {0}")]
    NotGram(String),
}

/// `n` linearly independent unit states with prior probabilities.
///
/// Immutable after construction; all invariants are enforced by [`StateEnsemble::new`].
#[derive(Debug, Clone)]
pub struct StateEnsemble {
    /// `d × n` matrix `Φ` whose `i`th column is the `i`th state.
    states: DMatrix<C64>,
    /// Simplex vector `γ` of length `n`.
    priors: DVector<f64>,
}

impl StateEnsemble {
    /// Validates raw states and priors and builds the ensemble.
    ///
    /// States within [`TOL_NORM`] of unit norm are re-normalized; priors must
    /// be non-negative and sum to 1 within [`TOL_NORM`] (they are then
    /// re-normalized exactly). Rejects fewer than two states, ambient
    /// dimension below `n`, and linearly dependent states
    /// (`det(X) ≤ `[`TOL_RANK`]).
    pub fn new(
        raw_states: Vec<DVector<C64>>,
        raw_priors: DVector<f64>,
    ) -> Result<Self, EnsembleError> {
        let n = raw_states.len();
        if n < 2 {
            return Err(EnsembleError::DimensionMismatch(format!(
                "need at least 2 states, got {n}"
            )));
        }
        let d = raw_states[0].len();
        for (i, s) in raw_states.iter().enumerate() {
            if s.len() != d {
                return Err(EnsembleError::DimensionMismatch(format!(
                    "state {i} has dimension {}, state 0 has dimension {d}",
                    s.len()
                )));
            }
        }
        if d < n {
            return Err(EnsembleError::DimensionMismatch(format!(
                "ambient dimension {d} is smaller than the number of states {n}"
            )));
        }

        let mut states = DMatrix::<C64>::zeros(d, n);
        for (i, s) in raw_states.iter().enumerate() {
            let norm = s.norm();
            if (norm - 1.0).abs() > TOL_NORM {
                return Err(EnsembleError::NotNormalized { index: i, norm });
            }
            states.set_column(i, &(s / C64::new(norm, 0.0)));
        }

        if raw_priors.len() != n {
            return Err(EnsembleError::PriorsInvalid(format!(
                "got {} priors for {n} states",
                raw_priors.len()
            )));
        }
        if let Some(g) = raw_priors.iter().find(|g| !g.is_finite() || **g < 0.0) {
            return Err(EnsembleError::PriorsInvalid(format!(
                "negative or non-finite entry {g}"
            )));
        }
        let sum: f64 = raw_priors.sum();
        if (sum - 1.0).abs() > TOL_NORM {
            return Err(EnsembleError::PriorsInvalid(format!("sum is {sum}, not 1")));
        }
        let priors = raw_priors / sum;

        let ensemble = Self { states, priors };
        let det = ensemble.gram().det();
        if det <= TOL_RANK {
            return Err(EnsembleError::LinearlyDependent(det));
        }
        Ok(ensemble)
    }

    pub fn n(&self) -> usize {
        self.states.ncols()
    }

    /// Ambient dimension `d` of the state vectors.
    pub fn dim(&self) -> usize {
        self.states.nrows()
    }

    /// The matrix `Φ` whose `i`th column is the `i`th state.
    pub fn states(&self) -> &DMatrix<C64> {
        &self.states
    }

    pub fn priors(&self) -> &DVector<f64> {
        &self.priors
    }

    /// Gram matrix `X = Φ†Φ` with its eigen-structure.
    pub fn gram(&self) -> GramMatrix {
        let mut x = self.states.adjoint() * &self.states;
        // Hermitize and pin the unit diagonal; both are exact for normalized
        // states up to rounding.
        let xh = x.adjoint();
        x = (x + xh) * C64::new(0.5, 0.0);
        for i in 0..x.nrows() {
            x[(i, i)] = C64::new(1.0, 0.0);
        }
        GramMatrix::from_hermitian(x)
    }

    /// Dual (reciprocal) states `Φ̃ = Φ(Φ†Φ)⁻¹`, biorthogonal to the states:
    /// `⟨ψ_j|ψ̃_i⟩ = δ_ij`.
    pub fn dual_states(&self) -> DualStates {
        let inv = self.gram().inverse();
        DualStates {
            columns: &self.states * inv,
        }
    }
}

/// Hermitian Gram matrix `X` with unit diagonal and cached eigen-decomposition.
///
/// Eigenvalues are stored in descending order; `σ_min(X) > 0` certifies linear
/// independence and is exposed as a conditioning diagnostic.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    entries: DMatrix<C64>,
    /// Eigenvalues sorted descending: `σ₁ ≥ … ≥ σₙ`.
    eigenvalues: DVector<f64>,
    /// Unit eigenvectors, column `k` paired with `eigenvalues[k]`.
    eigenvectors: DMatrix<C64>,
}

impl GramMatrix {
    /// Builds a Gram matrix from raw entries, checking Hermitian symmetry,
    /// unit diagonal and positive definiteness.
    pub fn from_entries(entries: DMatrix<C64>) -> Result<Self, EnsembleError> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(EnsembleError::NotGram(format!(
                "matrix is {}x{}, not square",
                n,
                entries.ncols()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let diff = entries[(i, j)] - entries[(j, i)].conj();
                if diff.norm() > 1e-12 {
                    return Err(EnsembleError::NotGram(format!(
                        "not Hermitian at ({i},{j}): asymmetry {:.3e}",
                        diff.norm()
                    )));
                }
            }
            if (entries[(i, i)].re - 1.0).abs() > 1e-9 {
                return Err(EnsembleError::NotGram(format!(
                    "diagonal entry {i} is {}, not 1",
                    entries[(i, i)].re
                )));
            }
        }
        let mut x = entries.clone();
        let xh = x.adjoint();
        x = (x + xh) * C64::new(0.5, 0.0);
        for i in 0..n {
            x[(i, i)] = C64::new(1.0, 0.0);
        }
        let g = Self::from_hermitian(x);
        if g.sigma_min() <= 0.0 {
            return Err(EnsembleError::NotGram(format!(
                "not positive definite: sigma_min = {:.3e}",
                g.sigma_min()
            )));
        }
        Ok(g)
    }

    fn from_hermitian(x: DMatrix<C64>) -> Self {
        let eig = SymmetricEigen::new(x.clone());
        let mut order: Vec<usize> = (0..x.nrows()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues = DVector::from_iterator(order.len(), order.iter().map(|&k| eig.eigenvalues[k]));
        let eigenvectors = DMatrix::from_columns(
            &order
                .iter()
                .map(|&k| eig.eigenvectors.column(k).into_owned())
                .collect::<Vec<_>>(),
        );
        Self {
            entries: x,
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    /// Eigenvalues sorted descending.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Smallest eigenvalue `σₙ(X)`; conditioning diagnostic.
    pub fn sigma_min(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// Determinant as the product of eigenvalues.
    pub fn det(&self) -> f64 {
        self.eigenvalues.iter().product()
    }

    /// Inverse via the eigen-decomposition.
    pub fn inverse(&self) -> DMatrix<C64> {
        let n = self.n();
        let mut inv = DMatrix::<C64>::zeros(n, n);
        for k in 0..n {
            let u = self.eigenvectors.column(k);
            let scale = C64::new(1.0 / self.eigenvalues[k], 0.0);
            inv += (u * u.adjoint()) * scale;
        }
        inv
    }
}

/// The dual states `|ψ̃_i⟩`, stored as columns of `Φ̃` (dimension `d × n`).
#[derive(Debug, Clone)]
pub struct DualStates {
    columns: DMatrix<C64>,
}

impl DualStates {
    pub fn columns(&self) -> &DMatrix<C64> {
        &self.columns
    }

    pub fn dual(&self, i: usize) -> DVector<C64> {
        self.columns.column(i).into_owned()
    }

    /// `max_{i,j} |⟨ψ_j|ψ̃_i⟩ − δ_ij|`, the biorthogonality residual.
    pub fn biorthogonality_residual(&self, ensemble: &StateEnsemble) -> f64 {
        let prod = ensemble.states().adjoint() * &self.columns;
        let n = prod.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}
