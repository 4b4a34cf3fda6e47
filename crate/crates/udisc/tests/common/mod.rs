//! Shared fixtures and seeded random-instance generators for the
//! integration suites.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use udisc::ensemble::{GramMatrix, StateEnsemble};
use udisc::solver::{optimize_gram, Classification, OptimumSolution, SolverConfig};
use udisc::C64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// The three-state workhorse: two states in a plane, one leaving it, with
/// pairwise overlaps 1/√5, 2/√17 and 6/√85.
pub fn fixture_states() -> Vec<DVector<C64>> {
    let s5 = 5.0f64.sqrt();
    let s17 = 17.0f64.sqrt();
    let col = |v: &[f64]| DVector::from_iterator(3, v.iter().map(|&x| C64::new(x, 0.0)));
    vec![
        col(&[1.0, 0.0, 0.0]),
        col(&[1.0 / s5, 2.0 / s5, 0.0]),
        col(&[2.0 / s17, 2.0 / s17, 3.0 / s17]),
    ]
}

pub fn fixture_ensemble(priors: [f64; 3]) -> StateEnsemble {
    StateEnsemble::new(fixture_states(), DVector::from_row_slice(&priors)).unwrap()
}

/// Random Hermitian Gram matrix with unit diagonal: a normalized random
/// Wishart blended with the identity (`beta` controls overlap strength),
/// resampled until reasonably conditioned.
pub fn random_gram(n: usize, beta: f64, complex: bool, rng: &mut ChaCha8Rng) -> GramMatrix {
    loop {
        let a = DMatrix::from_fn(n, n, |_, _| {
            C64::new(normal(rng), if complex { normal(rng) } else { 0.0 })
        });
        let g = a.adjoint() * &a;
        let scale: Vec<f64> = (0..n).map(|i| g[(i, i)].re.sqrt()).collect();
        let mut x = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let blend = g[(i, j)] / C64::new(scale[i] * scale[j], 0.0) * C64::new(beta, 0.0);
                x[(i, j)] = blend + if i == j { C64::new(1.0 - beta, 0.0) } else { C64::new(0.0, 0.0) };
            }
        }
        for i in 0..n {
            x[(i, i)] = C64::new(1.0, 0.0);
        }
        if let Ok(gram) = GramMatrix::from_entries(x) {
            if gram.sigma_min() > 0.05 {
                return gram;
            }
        }
    }
}

/// Strictly positive random priors with a floor, normalized to the simplex.
pub fn random_priors(n: usize, floor: f64, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let mut g = DVector::from_iterator(n, (0..n).map(|_| normal(rng).abs() + floor));
    g /= g.sum();
    g
}

/// States realizing a given Gram matrix: the Hermitian square root of `X`
/// embedded in dimension `d ≥ n` through a random unitary.
pub fn states_for_gram(
    x: &GramMatrix,
    d: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<DVector<C64>> {
    let n = x.n();
    assert!(d >= n);
    let eig = SymmetricEigen::new(x.entries().clone());
    let mut root = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        let u = eig.eigenvectors.column(k);
        root += (u * u.adjoint()) * C64::new(eig.eigenvalues[k].max(0.0).sqrt(), 0.0);
    }
    let mut phi = DMatrix::<C64>::zeros(d, n);
    phi.rows_mut(0, n).copy_from(&root);
    let q = DMatrix::from_fn(d, d, |_, _| C64::new(normal(rng), normal(rng)))
        .qr()
        .q();
    let phi = q * phi;
    (0..n).map(|i| phi.column(i).into_owned()).collect()
}

pub fn random_ensemble(
    n: usize,
    d: usize,
    beta: f64,
    complex: bool,
    rng: &mut ChaCha8Rng,
) -> StateEnsemble {
    let x = random_gram(n, beta, complex, rng);
    let states = states_for_gram(&x, d, rng);
    let priors = random_priors(n, 0.05, rng);
    StateEnsemble::new(states, priors).unwrap()
}

/// A random problem whose optimum is interior non-singular, together with
/// its solved optimum. Plain rejection sampling, with a constrained-ratio
/// construction as fallback (its minors-derived priors make the constrained
/// point the interior optimum by design).
pub fn random_interior_instance(
    n: usize,
    rng: &mut ChaCha8Rng,
) -> (GramMatrix, DVector<f64>, OptimumSolution) {
    let cfg = SolverConfig::default();
    for _ in 0..50 {
        let x = random_gram(n, 0.25 + 0.35 * rng.random::<f64>(), true, rng);
        let priors = random_priors(n, 0.10, rng);
        if let Ok(sol) = optimize_gram(&x, &priors, &cfg) {
            if sol.classification == Classification::InteriorNonSingular {
                return (x, priors, sol);
            }
        }
    }
    loop {
        let x = random_gram(n, 0.25 + 0.35 * rng.random::<f64>(), true, rng);
        let w = DVector::from_iterator(n, (0..n).map(|_| 0.7 + 0.6 * rng.random::<f64>()));
        let scaled = {
            let mut s = x.entries().clone();
            for i in 0..n {
                for j in 0..n {
                    s[(i, j)] /= C64::new((w[i] * w[j]).sqrt(), 0.0);
                }
            }
            s
        };
        let sigma = scaled.symmetric_eigenvalues().fold(f64::INFINITY, f64::min);
        let p = udisc::feasible::SuccessPoint(&w * sigma);
        let minors = udisc::feasible::all_minors(&x, &p);
        if minors.iter().any(|m| *m < 1e-4) {
            continue;
        }
        let priors = &minors / minors.sum();
        if let Ok(sol) = optimize_gram(&x, &priors, &cfg) {
            if sol.classification == Classification::InteriorNonSingular {
                return (x, priors, sol);
            }
        }
    }
}
