//! Problem files, solution reports and the command implementations behind
//! the `udisc` binary.
//!
//! Problem files are JSON. Complex amplitudes are always two-element
//! `[re, im]` arrays; floats in reports are emitted in shortest
//! round-trip form (17 significant digits where needed), so reruns diff
//! cleanly. Exit-code contract: 0 success, 1 input error, 2
//! numerical/certificate failure.

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closedform::{extract_phases, gepm};
use crate::ensemble::StateEnsemble;
use crate::feasible::check_feasible;
use crate::oracle::sample_surface;
use crate::povm::{build_povm, simulate, PovmSet, SimulationReport};
use crate::solver::{optimize, Classification, SolverConfig};
use crate::C64;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, unparseable or semantically invalid input (exit code 1).
    #[error("input error: {0}")]
    Input(String),
    /// Solver or certificate failure on valid input (exit code 2).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

/// On-disk problem description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    /// One state per entry; each amplitude is a `[re, im]` pair.
    pub states: Vec<Vec<[f64; 2]>>,
    pub priors: Vec<f64>,
    /// Target success-probability ratios for the `gepm` command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl ProblemFile {
    /// Parses a JSON document; parse errors carry line/column context.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Input(format!(
                "problem file is not valid JSON at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })
    }

    pub fn to_ensemble(&self) -> Result<StateEnsemble, CliError> {
        let states: Vec<DVector<C64>> = self
            .states
            .iter()
            .map(|s| DVector::from_iterator(s.len(), s.iter().map(|a| C64::new(a[0], a[1]))))
            .collect();
        let priors = DVector::from_row_slice(&self.priors);
        StateEnsemble::new(states, priors)
            .map_err(|e| CliError::Input(format!("field `states`/`priors`: {e}")))
    }

    pub fn weights_vector(&self) -> Result<DVector<f64>, CliError> {
        let w = self
            .weights
            .as_ref()
            .ok_or_else(|| CliError::Input("field `weights` is required for gepm".into()))?;
        Ok(DVector::from_row_slice(w))
    }
}

/// A complex matrix as rows of `[re, im]` pairs.
pub type MatrixReport = Vec<Vec<[f64; 2]>>;

fn matrix_report(m: &DMatrix<C64>) -> MatrixReport {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PovmReport {
    pub elements: Vec<MatrixReport>,
    pub inconclusive: MatrixReport,
}

/// Serialized optimum.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SolutionReport {
    pub p: Vec<f64>,
    pub lambda: f64,
    pub p_bar: f64,
    /// `"interior"`, `"boundary"` or `"singular"`.
    pub classification: String,
    /// 1-based indices of the pinned coordinates, boundary optima only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_set: Option<Vec<usize>>,
    /// Null-vector phases (radians, `θ₁ = 0`), interior optima on request.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    pub residuals: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub povm: Option<PovmReport>,
    /// `p_bar − (oracle best)`, present with `--verify`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_gap: Option<f64>,
}

impl SolutionReport {
    /// Internal-consistency check run before any report is emitted.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Numerical(format!("report invalid: {msg}")));
        if !(-1e-9..=1.0 + 1e-9).contains(&self.p_bar) {
            return bad(format!("p_bar = {} out of [0, 1]", self.p_bar));
        }
        if self.p.iter().any(|v| !(-1e-9..=1.0 + 1e-9).contains(v)) {
            return bad("some p_i out of [0, 1]".into());
        }
        match self.classification.as_str() {
            "boundary" => {
                let Some(z) = &self.zero_set else {
                    return bad("boundary classification without zero_set".into());
                };
                if z.iter().any(|&i| i == 0 || i > self.p.len()) {
                    return bad("zero_set index out of range".into());
                }
                if z.iter().any(|&i| self.p[i - 1].abs() > 1e-9) {
                    return bad("zero_set coordinate not zero".into());
                }
            }
            "interior" | "singular" => {
                if self.zero_set.is_some() {
                    return bad("zero_set present for a non-boundary optimum".into());
                }
            }
            other => return bad(format!("unknown classification `{other}`")),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    /// Run the sampling oracle with this many samples and report the gap.
    pub verify: Option<usize>,
    /// Attach the null-vector phases for interior optima.
    pub phases: bool,
    /// Attach the measurement operators.
    pub povm: bool,
}

fn classification_report(c: &Classification) -> (String, Option<Vec<usize>>) {
    match c {
        Classification::Boundary { zero_set } => (
            "boundary".into(),
            Some(zero_set.iter().map(|i| i + 1).collect()),
        ),
        other => (other.label().into(), None),
    }
}

/// `solve`: run the three-step search, optionally attach phases, POVM
/// matrices and an oracle verification gap.
pub fn cmd_solve(
    problem: &ProblemFile,
    opts: &SolveOptions,
    cfg: &SolverConfig,
) -> Result<SolutionReport, CliError> {
    let ensemble = problem.to_ensemble()?;
    let sol = optimize(&ensemble, cfg).map_err(|e| CliError::Numerical(e.to_string()))?;
    let x = ensemble.gram();
    let (classification, zero_set) = classification_report(&sol.classification);

    let (phases, xi) = if opts.phases && sol.classification == Classification::InteriorNonSingular
    {
        let ph = extract_phases(&x, ensemble.priors(), &sol.p_opt)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        (Some(ph.thetas.iter().copied().collect()), Some(ph.xi))
    } else {
        (None, None)
    };

    let povm = if opts.povm {
        let set = build_povm(&ensemble, &sol.p_opt).map_err(|e| CliError::Numerical(e.to_string()))?;
        Some(PovmReport {
            elements: set.elements().iter().map(matrix_report).collect(),
            inconclusive: matrix_report(set.inconclusive()),
        })
    } else {
        None
    };

    let oracle_gap = opts.verify.map(|count| {
        let sample = sample_surface(&x, ensemble.priors(), count, cfg.rng_seed);
        sol.p_bar - sample.best_value
    });

    let report = SolutionReport {
        p: sol.p_opt.0.iter().copied().collect(),
        lambda: sol.lambda,
        p_bar: sol.p_bar,
        classification,
        zero_set,
        phases,
        xi,
        residuals: sol.residuals,
        povm,
        oracle_gap,
    };
    report.validate()?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GepmReport {
    /// Optimum under the ratio constraint: `p_i = w_i·sigma_min`.
    pub p: Vec<f64>,
    pub sigma_min: f64,
    pub minors: Vec<f64>,
    /// Priors making the constrained measurement globally optimal; absent in
    /// the singular case.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Vec<f64>>,
    pub singular: bool,
}

/// `gepm`: success probabilities constrained to the file's `weights` ratios.
pub fn cmd_gepm(problem: &ProblemFile) -> Result<GepmReport, CliError> {
    let ensemble = problem.to_ensemble()?;
    let weights = problem.weights_vector()?;
    let g = gepm(&ensemble, &weights).map_err(|e| CliError::Input(format!("field `weights`: {e}")))?;
    Ok(GepmReport {
        p: g.point.0.iter().copied().collect(),
        sigma_min: g.sigma_min,
        minors: g.minors.iter().copied().collect(),
        priors: g.priors.as_ref().map(|p| p.iter().copied().collect()),
        singular: g.is_singular(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SimulateReport {
    pub solution: SolutionReport,
    pub simulation: SimulationReport,
}

/// `simulate`: solve, build the optimal POVM and sample measurement outcomes.
pub fn cmd_simulate(
    problem: &ProblemFile,
    trials: u64,
    seed: u64,
) -> Result<SimulateReport, CliError> {
    if trials == 0 {
        return Err(CliError::Input("field `trials` must be at least 1".into()));
    }
    let cfg = SolverConfig {
        rng_seed: seed,
        ..SolverConfig::default()
    };
    let solution = cmd_solve(problem, &SolveOptions::default(), &cfg)?;
    let ensemble = problem.to_ensemble()?;
    let povm: PovmSet = build_povm(
        &ensemble,
        &crate::feasible::SuccessPoint::from_slice(&solution.p),
    )
    .map_err(|e| CliError::Numerical(e.to_string()))?;
    let simulation = simulate(&povm, &ensemble, trials, seed);
    Ok(SimulateReport {
        solution,
        simulation,
    })
}

/// `region`: export sampled critical-surface points as CSV (`p1,p2,p3`
/// header, `\n` line endings). Three-state problems only — the surface plot
/// this feeds is three-dimensional.
pub fn cmd_region<W: Write>(
    problem: &ProblemFile,
    samples: usize,
    seed: u64,
    out: &mut W,
) -> Result<(), CliError> {
    let ensemble = problem.to_ensemble()?;
    if ensemble.n() != 3 {
        return Err(CliError::Input(format!(
            "unsupported dimension: region export needs exactly 3 states, got {}",
            ensemble.n()
        )));
    }
    if samples == 0 {
        return Err(CliError::Input("field `samples` must be at least 1".into()));
    }
    let x = ensemble.gram();
    let sample = sample_surface(&x, ensemble.priors(), samples, seed);
    let mut buf = String::from("p1,p2,p3\n");
    for p in &sample.points {
        if !check_feasible(&x, p).on_critical_surface {
            return Err(CliError::Numerical(format!(
                "sampled point left the critical surface: {:?}",
                p.as_slice()
            )));
        }
        buf.push_str(&format!("{},{},{}\n", p.0[0], p.0[1], p.0[2]));
    }
    out.write_all(buf.as_bytes())
        .map_err(|e| CliError::Input(format!("cannot write output: {e}")))?;
    Ok(())
}
