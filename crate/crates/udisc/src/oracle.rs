//! Independent brute-force maximizer of `γ·p` over the feasible set.
//!
//! The critical surface is star-shaped with respect to the origin (`σ_min` is
//! monotone along rays), so sampling directions in the positive orthant and
//! projecting each onto the surface covers it. A deterministic pattern search
//! over direction space then refines the best sample. The oracle shares no
//! code path with the equation solvers beyond the ray projection, so it
//! serves as an independent check on them.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::ensemble::GramMatrix;
use crate::feasible::{ray_to_surface, SuccessPoint};

/// Componentwise floor for sampled directions; keeps rays off degenerate
/// axes while refinement can still approach the `p_i = 0` faces.
const DIRECTION_FLOOR: f64 = 1e-6;

/// A batch of critical-surface points ranked by average success probability.
#[derive(Debug, Clone)]
pub struct SurfaceSample {
    pub points: Vec<SuccessPoint>,
    pub best: SuccessPoint,
    /// `γ·best`.
    pub best_value: f64,
}

/// Draws `count` directions uniformly from the strictly positive orthant of
/// the unit sphere (absolute values of standard normals, floored at 1e-6) and
/// projects each onto the critical surface. Deterministic for a fixed seed;
/// projections run in parallel but the ranking ignores completion order
/// (ties broken toward the lexicographically smaller point).
pub fn sample_surface(
    x: &GramMatrix,
    priors: &DVector<f64>,
    count: usize,
    seed: u64,
) -> SurfaceSample {
    assert!(count >= 1, "need at least one sample");
    let n = x.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let directions: Vec<DVector<f64>> = (0..count)
        .map(|_| {
            let mut d = DVector::from_iterator(n, (0..n).map(|_| {
                let g: f64 = rng.sample(StandardNormal);
                g.abs()
            }));
            let norm = d.norm();
            if norm > 0.0 {
                d /= norm;
            }
            d.apply(|v| *v = v.max(DIRECTION_FLOOR));
            d
        })
        .collect();

    let points: Vec<SuccessPoint> = directions
        .par_iter()
        .map(|d| ray_to_surface(x, d))
        .collect();

    let best = points
        .iter()
        .max_by(|a, b| {
            a.average(priors)
                .total_cmp(&b.average(priors))
                .then_with(|| b.0.iter().partial_cmp(a.0.iter()).unwrap())
        })
        .expect("count >= 1")
        .clone();
    let best_value = best.average(priors);
    SurfaceSample {
        points,
        best,
        best_value,
    }
}

/// Local pattern search constrained to the surface: coordinate moves in
/// direction space, re-projected through [`ray_to_surface`], accepted only on
/// improvement of `γ·p`. The step halves when a full poll fails and stops at
/// 1e-9; `iters` caps the number of projections. `γ·p` is monotone
/// non-decreasing from `start` (which must lie on the surface).
pub fn refine(
    x: &GramMatrix,
    priors: &DVector<f64>,
    start: &SuccessPoint,
    iters: usize,
) -> SuccessPoint {
    let n = x.n();
    let norm = start.0.norm();
    assert!(norm > 0.0, "start must be a nonzero surface point");
    let mut dir = &start.0 / norm;
    let mut best = start.clone();
    let mut best_value = best.average(priors);
    let mut step = 0.1;
    let mut evals = 0usize;

    // Poll moves: single-coordinate perturbations plus the pairwise
    // diagonals. Coordinate moves alone stall on ridges where improvement
    // needs two components to change together (common near kinks of the
    // surface).
    let mut moves: Vec<DVector<f64>> = Vec::new();
    for i in 0..n {
        for sign in [1.0f64, -1.0] {
            let mut m = DVector::zeros(n);
            m[i] = sign;
            moves.push(m);
        }
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            for (si, sj) in [(1.0f64, 1.0f64), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut m = DVector::zeros(n);
                m[i] = si * inv_sqrt2;
                m[j] = sj * inv_sqrt2;
                moves.push(m);
            }
        }
    }

    while step >= 1e-9 && evals < iters {
        let mut improved = false;
        'poll: for m in &moves {
            let mut cand = &dir + m * step;
            cand.apply(|v| *v = v.max(1e-12));
            let p = ray_to_surface(x, &cand);
            evals += 1;
            let v = p.average(priors);
            if v > best_value + 1e-15 {
                dir = cand;
                best = p;
                best_value = v;
                improved = true;
                break 'poll;
            }
            if evals >= iters {
                break 'poll;
            }
        }
        if improved {
            step = (step * 2.0).min(0.2);
        } else {
            step *= 0.5;
        }
    }
    best
}
