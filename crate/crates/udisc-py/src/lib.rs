//! Python bindings for the unambiguous-discrimination solver.
//!
//! States are lists of `(re, im)` amplitude pairs; results come back as
//! plain dicts/lists. Build with `cargo build -p udisc-py --release` and
//! import the produced shared library as `udisc_py` (see
//! `python/smoke_test.py`).

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use nalgebra::DVector;
use udisc::closedform::extract_phases;
use udisc::ensemble::StateEnsemble;
use udisc::feasible::SuccessPoint;
use udisc::oracle::sample_surface;
use udisc::povm::{build_povm, outcome_distribution, simulate as run_simulation};
use udisc::solver::{optimize, Classification, SolverConfig};
use udisc::C64;

fn to_ensemble(states: Vec<Vec<(f64, f64)>>, priors: Vec<f64>) -> PyResult<StateEnsemble> {
    let states: Vec<DVector<C64>> = states
        .iter()
        .map(|s| DVector::from_iterator(s.len(), s.iter().map(|&(re, im)| C64::new(re, im))))
        .collect();
    StateEnsemble::new(states, DVector::from_row_slice(&priors))
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

fn config(seed: u64, multistarts: usize) -> SolverConfig {
    SolverConfig {
        rng_seed: seed,
        multistarts,
        ..SolverConfig::default()
    }
}

fn matrix_to_py(m: &nalgebra::DMatrix<C64>) -> Vec<Vec<(f64, f64)>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| (m[(i, j)].re, m[(i, j)].im)).collect())
        .collect()
}

/// Solve for the optimum unambiguous-discrimination strategy.
///
/// Returns a dict with `p`, `lambda`, `p_bar`, `classification`, `residuals`
/// and, where applicable, `zero_set` (1-based) and `phases`/`xi`.
#[pyfunction]
#[pyo3(signature = (states, priors, seed=0, multistarts=32, phases=false))]
fn solve<'py>(
    py: Python<'py>,
    states: Vec<Vec<(f64, f64)>>,
    priors: Vec<f64>,
    seed: u64,
    multistarts: usize,
    phases: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let ensemble = to_ensemble(states, priors)?;
    let cfg = config(seed, multistarts);
    let sol = optimize(&ensemble, &cfg).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;

    let out = PyDict::new(py);
    out.set_item("p", sol.p_opt.as_slice().to_vec())?;
    out.set_item("lambda", sol.lambda)?;
    out.set_item("p_bar", sol.p_bar)?;
    out.set_item("classification", sol.classification.label())?;
    if let Classification::Boundary { zero_set } = &sol.classification {
        out.set_item("zero_set", zero_set.iter().map(|i| i + 1).collect::<Vec<_>>())?;
    }
    let residuals = PyDict::new(py);
    for (k, v) in &sol.residuals {
        residuals.set_item(k, *v)?;
    }
    out.set_item("residuals", residuals)?;

    if phases && sol.classification == Classification::InteriorNonSingular {
        let x = ensemble.gram();
        let ph = extract_phases(&x, ensemble.priors(), &sol.p_opt)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        out.set_item("phases", ph.thetas.as_slice().to_vec())?;
        out.set_item("xi", ph.xi)?;
    }
    Ok(out)
}

/// Generalized equal-probability measurement: success probabilities
/// constrained to the ratios `weights`.
#[pyfunction]
fn gepm<'py>(
    py: Python<'py>,
    states: Vec<Vec<(f64, f64)>>,
    weights: Vec<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let n = states.len();
    let uniform = vec![1.0 / n as f64; n];
    let ensemble = to_ensemble(states, uniform)?;
    let g = udisc::closedform::gepm(&ensemble, &DVector::from_row_slice(&weights))
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let out = PyDict::new(py);
    out.set_item("p", g.point.as_slice().to_vec())?;
    out.set_item("sigma_min", g.sigma_min)?;
    out.set_item("minors", g.minors.as_slice().to_vec())?;
    out.set_item("singular", g.is_singular())?;
    out.set_item(
        "priors",
        g.priors.as_ref().map(|p| p.as_slice().to_vec()),
    )?;
    Ok(out)
}

/// Materialize the optimal POVM at a success point `p`.
#[pyfunction]
fn povm<'py>(
    py: Python<'py>,
    states: Vec<Vec<(f64, f64)>>,
    priors: Vec<f64>,
    p: Vec<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let ensemble = to_ensemble(states, priors)?;
    let set = build_povm(&ensemble, &SuccessPoint::from_slice(&p))
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let out = PyDict::new(py);
    out.set_item(
        "elements",
        set.elements().iter().map(matrix_to_py).collect::<Vec<_>>(),
    )?;
    out.set_item("inconclusive", matrix_to_py(set.inconclusive()))?;
    let dists: Vec<Vec<f64>> = (0..ensemble.n())
        .map(|i| outcome_distribution(&set, &ensemble, i).as_slice().to_vec())
        .collect();
    out.set_item("outcome_distributions", dists)?;
    Ok(out)
}

/// Solve, build the optimal POVM and sample `trials` measurement outcomes.
#[pyfunction]
#[pyo3(signature = (states, priors, trials, seed=0))]
fn simulate<'py>(
    py: Python<'py>,
    states: Vec<Vec<(f64, f64)>>,
    priors: Vec<f64>,
    trials: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let ensemble = to_ensemble(states, priors)?;
    let cfg = config(seed, SolverConfig::default().multistarts);
    let sol = optimize(&ensemble, &cfg).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let set = build_povm(&ensemble, &sol.p_opt)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let report = run_simulation(&set, &ensemble, trials, seed);
    let out = PyDict::new(py);
    out.set_item("p_bar", sol.p_bar)?;
    out.set_item("trials", report.trials)?;
    out.set_item("seed", report.seed)?;
    out.set_item("counts", report.counts)?;
    out.set_item("empirical_success", report.empirical_success)?;
    out.set_item("empirical_error", report.empirical_error)?;
    Ok(out)
}

/// Sample critical-surface points (the region whose upper surface carries
/// every optimum), ranked by average success probability.
#[pyfunction]
#[pyo3(signature = (states, priors, count, seed=0))]
fn sample_region<'py>(
    py: Python<'py>,
    states: Vec<Vec<(f64, f64)>>,
    priors: Vec<f64>,
    count: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let ensemble = to_ensemble(states, priors)?;
    let x = ensemble.gram();
    let sample = sample_surface(&x, ensemble.priors(), count, seed);
    let out = PyDict::new(py);
    out.set_item(
        "points",
        sample
            .points
            .iter()
            .map(|p| p.as_slice().to_vec())
            .collect::<Vec<_>>(),
    )?;
    out.set_item("best", sample.best.as_slice().to_vec())?;
    out.set_item("best_value", sample.best_value)?;
    Ok(out)
}

/// Dual (reciprocal) states, biorthogonal to the inputs.
#[pyfunction]
fn dual_states(states: Vec<Vec<(f64, f64)>>) -> PyResult<Vec<Vec<(f64, f64)>>> {
    let n = states.len();
    let uniform = vec![1.0 / n as f64; n];
    let ensemble = to_ensemble(states, uniform)?;
    let duals = ensemble.dual_states();
    Ok((0..n)
        .map(|i| {
            let d = duals.dual(i);
            d.iter().map(|z| (z.re, z.im)).collect()
        })
        .collect())
}

#[pymodule]
fn udisc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(gepm, m)?)?;
    m.add_function(wrap_pyfunction!(povm, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(sample_region, m)?)?;
    m.add_function(wrap_pyfunction!(dual_states, m)?)?;
    Ok(())
}
