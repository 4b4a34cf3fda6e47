//! Optimal unambiguous discrimination of linearly independent pure quantum states.
//!
//! Given `n` linearly independent pure states with prior probabilities, an
//! unambiguous measurement either identifies the prepared state with certainty
//! or returns an inconclusive outcome. The realizable per-state success
//! probabilities `p` are exactly those with `X − diag(p) ⪰ 0` and `p ≥ 0`,
//! where `X` is the Gram matrix of the states. This crate maximizes the average
//! success probability `γ·p` over that convex set:
//!
//! - [`ensemble`] — input validation, Gram matrix, dual (reciprocal) states;
//! - [`feasible`] — feasibility checks, principal minors, ray projection onto
//!   the critical surface `σ_min(X − diag(p)) = 0`;
//! - [`solver`] — the three-step optimum search (interior Newton solve,
//!   boundary zero-set enumeration, singular-point search) with optimality
//!   certificates;
//! - [`closedform`] — phase representation of interior optima, the star
//!   (hub) configuration, generalized equal-probability measurements, and
//!   the three-state analytical solvers;
//! - [`povm`] — materialized measurement operators and Monte Carlo simulation;
//! - [`oracle`] — independent brute-force surface sampler used for
//!   verification;
//! - [`cli`] — problem/report file formats and the command implementations
//!   behind the `udisc` binary.
//!
//! All solver entry points are deterministic for a fixed seed.

pub mod cli;
pub mod closedform;
pub mod ensemble;
pub mod feasible;
pub mod oracle;
pub mod povm;
pub mod solver;

/// Complex scalar used throughout: `(re, im)` pair of `f64`.
pub type C64 = nalgebra::Complex<f64>;

pub use ensemble::{DualStates, GramMatrix, StateEnsemble};
pub use feasible::{FeasibilityReport, SuccessPoint};
pub use povm::{PovmSet, SimulationReport};
pub use solver::{Classification, OptimumSolution, SolverConfig};
