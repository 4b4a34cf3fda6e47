//! Three-step search for the optimum success-probability point.
//!
//! The optimum always lies on the critical surface `σ_min(X − Γ) = 0`. It is
//! found by trying, in order:
//!
//! 1. the interior system `{M_k(p) = γ_k λ, det(X − Γ) = 0}` with `λ > 0` and
//!    all `p_i > 0` (an if-and-only-if characterization, so acceptance is a
//!    global-optimality certificate);
//! 2. the same system restricted to each boundary face `p_i = 0, i ∈ Z`,
//!    enumerated by growing `|Z|`, with the slack conditions
//!    `M_i(p) ≥ λ γ_i` on the pinned coordinates;
//! 3. the singular-point system `{M_k(p) = 0}` (the `λ = 0` degeneration),
//!    keeping the feasible root that maximizes `γ·p`.
//!
//! Every returned solution is re-checked by [`certify`].

use std::collections::BTreeMap;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::ensemble::{GramMatrix, StateEnsemble, TOL_RANK};
use crate::feasible::{
    all_minors, det_xg, min_eigenvalue, ray_to_surface, SuccessPoint, TOL_PSD, TOL_SURFACE,
};

/// Central finite-difference step for Newton Jacobians.
const FD_STEP: f64 = 1e-7;
/// Step for the finite-difference gradient check `∇σ_min = −γ` in [`certify`].
const GRAD_STEP: f64 = 1e-6;
/// Agreement required from that gradient check.
const GRAD_TOL: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Newton stopping tolerance on the residual max-norm.
    pub tol_newton: f64,
    /// Newton iteration cap per start.
    pub max_iter: usize,
    /// Number of random restarts (on top of the deterministic start).
    pub multistarts: usize,
    /// Seed for the restart generator; the solve is deterministic given this.
    pub rng_seed: u64,
    /// Certificate tolerance; also the strictness margin for `λ > 0` and
    /// `p_i > 0` when classifying.
    pub tol_cert: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_newton: 1e-12,
            max_iter: 80,
            multistarts: 32,
            rng_seed: 0,
            tol_cert: 1e-6,
        }
    }
}

/// Which kind of critical-surface point the optimum is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    /// Smooth surface point with all `p_i > 0`; `M_k = γ_k λ` with `λ > 0`.
    InteriorNonSingular,
    /// Some coordinates pinned to zero (0-based indices, sorted).
    Boundary { zero_set: Vec<usize> },
    /// All principal minors vanish; `σ_min` is degenerate or has zero gradient.
    Singular,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::InteriorNonSingular => "interior",
            Classification::Boundary { .. } => "boundary",
            Classification::Singular => "singular",
        }
    }
}

/// A certified optimum: the point, its multiplier, the average success
/// probability and the certificate residuals backing the classification.
#[derive(Debug, Clone)]
pub struct OptimumSolution {
    pub p_opt: SuccessPoint,
    /// Proportionality multiplier in `M_k = γ_k λ`; zero for singular optima.
    pub lambda: f64,
    /// `γ·p_opt`.
    pub p_bar: f64,
    pub classification: Classification,
    pub residuals: BTreeMap<String, f64>,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("no optimum found; all three search steps failed ({0})")]
    SolverFailure(String),
    #[error("certificate violation: {name} = {value:.6e} (tolerance {tol:.1e})")]
    CertificateViolation { name: String, value: f64, tol: f64 },
}

/// Damped Newton iteration with a central finite-difference Jacobian
/// (step [`FD_STEP`] per component). Returns the iterate once the residual
/// max-norm drops below `tol`, or `None` if this start fails.
fn newton<F>(residual: &F, start: DVector<f64>, tol: f64, max_iter: usize) -> Option<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let m = start.len();
    let mut x = start;
    let mut fx = residual(&x);
    for _ in 0..max_iter {
        if fx.amax() < tol {
            return Some(x);
        }
        let mut jac = DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            let mut xp = x.clone();
            xp[j] += FD_STEP;
            let mut xm = x.clone();
            xm[j] -= FD_STEP;
            let fp = residual(&xp);
            let fm = residual(&xm);
            for i in 0..m {
                jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * FD_STEP);
            }
        }
        let delta = jac.lu().solve(&fx)?;
        let norm0 = fx.norm();
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..10 {
            let xn = &x - &delta * alpha;
            let fn_ = residual(&xn);
            if fn_.norm() <= (1.0 - 1e-4 * alpha) * norm0 {
                x = xn;
                fx = fn_;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    if fx.amax() < tol {
        Some(x)
    } else {
        None
    }
}

fn random_positive_direction(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_iterator(
        n,
        (0..n).map(|_| {
            let g: f64 = rng.sample(StandardNormal);
            g.abs().max(1e-6)
        }),
    )
}

/// Deterministic start shared by all three systems: the equal-probability
/// point `σ_min(X)·(1,…,1)`, which already lies on the critical surface.
fn epm_start(x: &GramMatrix) -> SuccessPoint {
    SuccessPoint(DVector::from_element(x.n(), x.sigma_min()))
}

/// Acceptance condition shared by the interior and boundary systems: the
/// root must be feasible and genuinely on the critical surface. A vanishing
/// determinant alone is not enough — near a singular point two eigenvalues
/// shrink together, so `det ≈ 0` can hold at points strictly inside the
/// feasible set.
fn on_surface(x: &GramMatrix, p: &SuccessPoint) -> bool {
    let sigma = min_eigenvalue(x, p);
    sigma >= -TOL_PSD && sigma.abs() <= TOL_SURFACE
}

/// Step I: the interior system `{M_k(p) = γ_k λ (k = 1..n), det(X−Γ) = 0}`
/// over unknowns `(p, λ)`.
///
/// Returns the solution only if `λ > 0`, all `p_i > 0` and `X − Γ ⪰ 0`;
/// `None` means the optimum is not an interior non-singular point and the
/// caller proceeds to the boundary search.
pub fn solve_interior(
    x: &GramMatrix,
    priors: &DVector<f64>,
    cfg: &SolverConfig,
) -> Option<(SuccessPoint, f64)> {
    let n = x.n();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut starts = Vec::with_capacity(cfg.multistarts + 1);
    starts.push(epm_start(x));
    for _ in 0..cfg.multistarts {
        starts.push(ray_to_surface(x, &random_positive_direction(n, &mut rng)));
    }

    interior_from_starts(x, priors, starts, cfg)
}

fn interior_from_starts(
    x: &GramMatrix,
    priors: &DVector<f64>,
    starts: Vec<SuccessPoint>,
    cfg: &SolverConfig,
) -> Option<(SuccessPoint, f64)> {
    let n = x.n();
    let residual = |z: &DVector<f64>| -> DVector<f64> {
        let p = SuccessPoint(z.rows(0, n).into_owned());
        let lam = z[n];
        let minors = all_minors(x, &p);
        let mut r = DVector::zeros(n + 1);
        for k in 0..n {
            r[k] = minors[k] - priors[k] * lam;
        }
        r[n] = det_xg(x, &p);
        r
    };
    for p0 in starts {
        let lam0: f64 = all_minors(x, &p0).sum();
        let mut z0 = DVector::zeros(n + 1);
        z0.rows_mut(0, n).copy_from(&p0.0);
        z0[n] = lam0;
        if let Some(z) = newton(&residual, z0, cfg.tol_newton, cfg.max_iter) {
            let p = SuccessPoint(z.rows(0, n).into_owned());
            let lam = z[n];
            if lam > cfg.tol_cert && p.0.iter().all(|v| *v > cfg.tol_cert) && on_surface(x, &p) {
                return Some((p, lam));
            }
        }
    }
    None
}

/// Projected-gradient ascent of `γ·p` along the critical surface. Where the
/// smallest eigenvalue is simple its gradient is `∂σ_min/∂p_k = −|u_k|²`
/// with `u` the corresponding unit eigenvector; the priors vector is
/// projected off that normal and the step re-projected onto the surface
/// along its ray. Only improving moves are accepted, so the iteration is
/// monotone and deterministic.
fn surface_ascent(
    x: &GramMatrix,
    priors: &DVector<f64>,
    start: SuccessPoint,
    max_steps: usize,
) -> SuccessPoint {
    let n = x.n();
    let mut p = start;
    let mut value = p.average(priors);
    let mut step = 0.1f64;
    for _ in 0..max_steps {
        if step < 1e-10 {
            break;
        }
        let eig = nalgebra::SymmetricEigen::new(crate::feasible::xg(x, &p));
        let idx = (0..n)
            .min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
            .expect("nonempty spectrum");
        let u = eig.eigenvectors.column(idx);
        let normal = DVector::from_iterator(n, (0..n).map(|k| u[k].norm_sqr()));
        let coeff = priors.dot(&normal) / normal.dot(&normal).max(1e-300);
        let mut tangent = priors - &normal * coeff;
        let norm = tangent.norm();
        if norm < 1e-12 {
            break;
        }
        tangent /= norm;
        let mut dir = &p.0 + &tangent * step;
        dir.apply(|v| *v = v.max(1e-12));
        let candidate = ray_to_surface(x, &dir);
        let v = candidate.average(priors);
        if v > value + 1e-15 {
            p = candidate;
            value = v;
        } else {
            step *= 0.5;
        }
    }
    p
}

/// Retry of the interior system seeded next to a singular point. A smooth
/// interior optimum with a small multiplier can sit close to a kink, in a
/// Newton basin too small for the orthant-wide multistarts to hit. The
/// eigen-gradient is unusable at the kink itself (degenerate eigenvector),
/// so the surface ascent starts from small coordinate perturbations of the
/// kink; Newton then finishes from wherever the ascent climbs to.
fn interior_near_singular(
    x: &GramMatrix,
    priors: &DVector<f64>,
    singular: &SuccessPoint,
    cfg: &SolverConfig,
) -> Option<(SuccessPoint, f64)> {
    let n = x.n();
    let base_value = singular.average(priors);
    let mut seeds = Vec::with_capacity(2 * n);
    for k in 0..n {
        for sign in [1.0f64, -1.0] {
            let mut dir = singular.0.clone();
            dir[k] = (dir[k] + sign * 0.02).max(1e-9);
            seeds.push(ray_to_surface(x, &dir));
        }
    }
    let mut starts: Vec<SuccessPoint> = seeds
        .into_iter()
        .map(|seed| surface_ascent(x, priors, seed, 300))
        .filter(|p| p.average(priors) > base_value + 1e-12)
        .collect();
    starts.sort_by(|a, b| b.average(priors).total_cmp(&a.average(priors)));
    starts.truncate(4);
    interior_from_starts(x, priors, starts, cfg)
}

/// Step II subproblem: the interior system restricted to the face
/// `p_i = 0 for i ∈ zero_set`, solved over the free coordinates and `λ`.
///
/// Accepts only if `λ > 0`, the free `p_i > 0`, `X − Γ ⪰ 0` and the slack
/// inequalities `M_i(p) ≥ λ γ_i` hold on the pinned coordinates.
pub fn solve_boundary(
    x: &GramMatrix,
    priors: &DVector<f64>,
    zero_set: &[usize],
    cfg: &SolverConfig,
) -> Option<(SuccessPoint, f64)> {
    let n = x.n();
    assert!(
        !zero_set.is_empty() && zero_set.len() < n && zero_set.iter().all(|&i| i < n),
        "zero_set must be a nonempty proper subset of the coordinate indices"
    );
    let free: Vec<usize> = (0..n).filter(|i| !zero_set.contains(i)).collect();
    let m = free.len();

    let embed = |z: &DVector<f64>| -> SuccessPoint {
        let mut p = DVector::zeros(n);
        for (j, &i) in free.iter().enumerate() {
            p[i] = z[j];
        }
        SuccessPoint(p)
    };
    let residual = |z: &DVector<f64>| -> DVector<f64> {
        let p = embed(z);
        let lam = z[m];
        let minors = all_minors(x, &p);
        let mut r = DVector::zeros(m + 1);
        for (j, &i) in free.iter().enumerate() {
            r[j] = minors[i] - priors[i] * lam;
        }
        r[m] = det_xg(x, &p);
        r
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut directions = Vec::with_capacity(cfg.multistarts + 1);
    directions.push(DVector::from_iterator(
        n,
        (0..n).map(|i| if free.contains(&i) { 1.0 } else { 0.0 }),
    ));
    for _ in 0..cfg.multistarts {
        let d = random_positive_direction(m, &mut rng);
        let mut full = DVector::zeros(n);
        for (j, &i) in free.iter().enumerate() {
            full[i] = d[j];
        }
        directions.push(full);
    }

    let prior_mass: f64 = free.iter().map(|&i| priors[i]).sum();
    for dir in directions {
        let p0 = ray_to_surface(x, &dir);
        let minors0 = all_minors(x, &p0);
        let lam0 = if prior_mass > 0.0 {
            free.iter().map(|&i| minors0[i]).sum::<f64>() / prior_mass
        } else {
            minors0.sum()
        };
        let mut z0 = DVector::zeros(m + 1);
        for (j, &i) in free.iter().enumerate() {
            z0[j] = p0.0[i];
        }
        z0[m] = lam0;
        if let Some(z) = newton(&residual, z0, cfg.tol_newton, cfg.max_iter) {
            let p = embed(&z);
            let lam = z[m];
            let minors = all_minors(x, &p);
            let slack_ok = zero_set
                .iter()
                .all(|&i| minors[i] >= lam * priors[i] - cfg.tol_cert);
            if lam > cfg.tol_cert
                && free.iter().all(|&i| p.0[i] > cfg.tol_cert)
                && on_surface(x, &p)
                && slack_ok
            {
                return Some((p, lam));
            }
        }
    }
    None
}

fn minors_jacobian(x: &GramMatrix, p: &DVector<f64>) -> DMatrix<f64> {
    let n = p.len();
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut pp = p.clone();
        pp[j] += FD_STEP;
        let mut pm = p.clone();
        pm[j] -= FD_STEP;
        let fp = all_minors(x, &SuccessPoint(pp));
        let fm = all_minors(x, &SuccessPoint(pm));
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * FD_STEP);
        }
    }
    jac
}

/// Gauss-Newton projection onto `{M(p) = 0}` with a pseudo-inverse step,
/// tolerant of the rank-deficient Jacobians this system has on degenerate
/// strata.
fn project_onto_singular_set(
    x: &GramMatrix,
    start: &DVector<f64>,
    tol: f64,
) -> Option<DVector<f64>> {
    let mut p = start.clone();
    for _ in 0..25 {
        let f = all_minors(x, &SuccessPoint(p.clone()));
        if f.amax() < tol {
            return Some(p);
        }
        let svd = minors_jacobian(x, &p).svd(true, true);
        let delta = svd.solve(&f, 1e-12).ok()?;
        if !delta.iter().all(|v| v.is_finite()) {
            return None;
        }
        p -= delta;
    }
    None
}

/// The singular set `{M(p) = 0}` need not be a finite set of points: on
/// ensembles with degenerate optima it contains whole strata along which
/// `γ·p` still varies. Starting from a root, ascend `γ·p` inside the set:
/// step along the projection of `γ` onto the Jacobian's null space, then
/// re-project, keeping feasibility. Deterministic.
fn ascend_singular_set(
    x: &GramMatrix,
    priors: &DVector<f64>,
    start: SuccessPoint,
    cfg: &SolverConfig,
) -> SuccessPoint {
    let mut best = start.0;
    let mut value = best.dot(priors);
    let mut step = 0.05f64;
    for _ in 0..120 {
        if step < 1e-10 {
            break;
        }
        let svd = minors_jacobian(x, &best).svd(false, true);
        let v_t = svd.v_t.as_ref().expect("requested V^T");
        let s_max = svd.singular_values.amax();
        let mut tangent = DVector::<f64>::zeros(best.len());
        for (i, s) in svd.singular_values.iter().enumerate() {
            if *s <= 1e-6 * s_max.max(1e-300) {
                let v = v_t.row(i).transpose();
                tangent += &v * v.dot(priors);
            }
        }
        let norm = tangent.norm();
        if norm < 1e-12 {
            break;
        }
        tangent /= norm;
        let mut moved = false;
        while step >= 1e-10 {
            let candidate = &best + &tangent * step;
            if let Some(projected) = project_onto_singular_set(x, &candidate, cfg.tol_newton) {
                let point = SuccessPoint(projected.clone());
                let report = crate::feasible::check_feasible(x, &point);
                let new_value = projected.dot(priors);
                if report.feasible
                    && report.sigma_min.abs() <= TOL_SURFACE
                    && new_value > value + 1e-14
                {
                    best = projected;
                    value = new_value;
                    moved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    SuccessPoint(best)
}

/// Step III: all feasible Newton-convergent roots of `{M_k(p) = 0}`, each
/// pushed to the top of its stratum by [`ascend_singular_set`], keeping the
/// one that maximizes `γ·p` (ties broken by ascending lexicographic
/// comparison of `p`). `None` when no singular point exists.
pub fn solve_singular(
    x: &GramMatrix,
    priors: &DVector<f64>,
    cfg: &SolverConfig,
) -> Option<SuccessPoint> {
    let n = x.n();
    let residual = |p: &DVector<f64>| all_minors(x, &SuccessPoint(p.clone()));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut starts = Vec::with_capacity(cfg.multistarts + 1);
    starts.push(epm_start(x));
    for _ in 0..cfg.multistarts {
        starts.push(ray_to_surface(x, &random_positive_direction(n, &mut rng)));
    }

    let mut found: Vec<SuccessPoint> = Vec::new();
    for p0 in starts {
        let Some(p) = newton(&residual, p0.0, cfg.tol_newton, cfg.max_iter) else {
            continue;
        };
        let p = SuccessPoint(p);
        let report = crate::feasible::check_feasible(x, &p);
        if !report.feasible || report.sigma_min.abs() > TOL_SURFACE {
            continue;
        }
        if found
            .iter()
            .all(|q| (&q.0 - &p.0).amax() > 1e-6)
        {
            found.push(p);
        }
    }

    let mut found: Vec<SuccessPoint> = found
        .into_iter()
        .map(|p| ascend_singular_set(x, priors, p, cfg))
        .collect();
    found.sort_by(|a, b| {
        b.average(priors)
            .total_cmp(&a.average(priors))
            .then_with(|| a.0.iter().partial_cmp(b.0.iter()).unwrap())
    });
    found.into_iter().next()
}

/// Runs the full three-step search and certifies the result.
pub fn optimize(
    ensemble: &StateEnsemble,
    cfg: &SolverConfig,
) -> Result<OptimumSolution, SolverError> {
    optimize_gram(&ensemble.gram(), ensemble.priors(), cfg)
}

/// Gram-level entry point of [`optimize`].
pub fn optimize_gram(
    x: &GramMatrix,
    priors: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<OptimumSolution, SolverError> {
    let n = x.n();
    assert_eq!(priors.len(), n, "dimension mismatch");

    // Orthogonal shortcut: every state is identified with certainty and the
    // multiplier degenerates to zero, which would trip the interior
    // classification thresholds.
    let max_offdiag = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| x.entries()[(i, j)].norm())
        .fold(0.0f64, f64::max);
    if max_offdiag < TOL_RANK {
        let p = SuccessPoint(DVector::from_element(n, 1.0));
        return build_solution(x, priors, p, 0.0, Classification::Singular, cfg, BTreeMap::new());
    }

    if let Some((p, lambda)) = solve_interior(x, priors, cfg) {
        return build_solution(
            x,
            priors,
            p,
            lambda,
            Classification::InteriorNonSingular,
            cfg,
            BTreeMap::new(),
        );
    }

    for size in 1..n {
        // Complete the whole size class so equal-optimal zero sets are
        // surfaced as ties instead of depending on enumeration order.
        let hits: Vec<(Vec<usize>, SuccessPoint, f64)> = (0..n)
            .combinations(size)
            .filter_map(|z| solve_boundary(x, priors, &z, cfg).map(|(p, lam)| (z, p, lam)))
            .collect();
        if let Some((zero_set, p, lambda)) = hits.first().cloned() {
            let mut extra = BTreeMap::new();
            if hits.len() > 1 {
                extra.insert("boundary_ties".to_string(), (hits.len() - 1) as f64);
            }
            return build_solution(
                x,
                priors,
                p,
                lambda,
                Classification::Boundary { zero_set },
                cfg,
                extra,
            );
        }
    }

    if let Some(p) = solve_singular(x, priors, cfg) {
        // A smooth interior optimum can hide in a tiny basin next to the
        // kink; give the interior system one more chance seeded there. An
        // acceptance is self-certifying and supersedes the singular point.
        if let Some((pi, lambda)) = interior_near_singular(x, priors, &p, cfg) {
            return build_solution(
                x,
                priors,
                pi,
                lambda,
                Classification::InteriorNonSingular,
                cfg,
                BTreeMap::new(),
            );
        }
        return build_solution(x, priors, p, 0.0, Classification::Singular, cfg, BTreeMap::new());
    }

    Err(SolverError::SolverFailure(format!(
        "n = {n}, sigma_min(X) = {:.3e}, multistarts = {}",
        x.sigma_min(),
        cfg.multistarts
    )))
}

fn build_solution(
    x: &GramMatrix,
    priors: &DVector<f64>,
    p_opt: SuccessPoint,
    lambda: f64,
    classification: Classification,
    cfg: &SolverConfig,
    extra: BTreeMap<String, f64>,
) -> Result<OptimumSolution, SolverError> {
    let p_bar = p_opt.average(priors);
    let mut sol = OptimumSolution {
        p_opt,
        lambda,
        p_bar,
        classification,
        residuals: extra,
    };
    let residuals = certify(x, priors, &sol, cfg)?;
    sol.residuals.extend(residuals);
    Ok(sol)
}

/// Recomputes every invariant behind a solution's classification and returns
/// the residual map; fails with the first violated certificate.
///
/// For interior optima this includes the finite-difference check of the
/// gradient condition `∇σ_min(p_opt) = −γ` (the global-optimality
/// certificate); the gradient check is skipped for singular optima, where
/// `σ_min` is degenerate and the gradient does not exist.
pub fn certify(
    x: &GramMatrix,
    priors: &DVector<f64>,
    sol: &OptimumSolution,
    cfg: &SolverConfig,
) -> Result<BTreeMap<String, f64>, SolverError> {
    let tol = cfg.tol_cert;
    let mut map = BTreeMap::new();
    let fail = |name: &str, value: f64, tol: f64| {
        Err(SolverError::CertificateViolation {
            name: name.to_string(),
            value,
            tol,
        })
    };

    let sigma = min_eigenvalue(x, &sol.p_opt);
    map.insert("sigma_min".to_string(), sigma);
    if sigma < -TOL_PSD {
        return fail("sigma_min (feasibility)", sigma, TOL_PSD);
    }
    if sigma.abs() > TOL_SURFACE {
        return fail("sigma_min (critical surface)", sigma.abs(), TOL_SURFACE);
    }
    let det = det_xg(x, &sol.p_opt);
    map.insert("det".to_string(), det);

    let p_min = sol.p_opt.0.fold(f64::INFINITY, f64::min);
    map.insert("p_min".to_string(), p_min);
    if p_min < -TOL_PSD {
        return fail("p_min", p_min, TOL_PSD);
    }
    if !(-1e-12..=1.0 + 1e-12).contains(&sol.p_bar) {
        return fail("p_bar range", sol.p_bar, 1e-12);
    }
    let p_bar = sol.p_opt.average(priors);
    if (p_bar - sol.p_bar).abs() > 1e-12 {
        return fail("p_bar consistency", (p_bar - sol.p_bar).abs(), 1e-12);
    }

    let minors = all_minors(x, &sol.p_opt);
    match &sol.classification {
        Classification::InteriorNonSingular => {
            if sol.lambda <= tol {
                return fail("lambda positivity", sol.lambda, tol);
            }
            let worst = (0..x.n())
                .map(|k| (minors[k] - priors[k] * sol.lambda).abs())
                .fold(0.0f64, f64::max);
            map.insert("minor_residual_max".to_string(), worst);
            if worst > tol {
                return fail("minor proportionality", worst, tol);
            }
            // ∇σ_min = −γ by central differences; the zero eigenvalue is
            // simple here, so σ_min is differentiable.
            let mut grad_resid = 0.0f64;
            for k in 0..x.n() {
                let mut pp = sol.p_opt.clone();
                pp.0[k] += GRAD_STEP;
                let mut pm = sol.p_opt.clone();
                pm.0[k] -= GRAD_STEP;
                let g = (min_eigenvalue(x, &pp) - min_eigenvalue(x, &pm)) / (2.0 * GRAD_STEP);
                grad_resid = grad_resid.max((g + priors[k]).abs());
            }
            map.insert("gradient_residual".to_string(), grad_resid);
            if grad_resid > GRAD_TOL {
                return fail("gradient condition", grad_resid, GRAD_TOL);
            }
        }
        Classification::Boundary { zero_set } => {
            if sol.lambda <= tol {
                return fail("lambda positivity", sol.lambda, tol);
            }
            for &i in zero_set {
                if sol.p_opt.0[i].abs() > TOL_PSD {
                    return fail("zero-set coordinate", sol.p_opt.0[i].abs(), TOL_PSD);
                }
            }
            let worst = (0..x.n())
                .filter(|i| !zero_set.contains(i))
                .map(|i| (minors[i] - priors[i] * sol.lambda).abs())
                .fold(0.0f64, f64::max);
            map.insert("minor_residual_max".to_string(), worst);
            if worst > tol {
                return fail("reduced minor proportionality", worst, tol);
            }
            let slack_min = zero_set
                .iter()
                .map(|&i| minors[i] - sol.lambda * priors[i])
                .fold(f64::INFINITY, f64::min);
            map.insert("slack_min".to_string(), slack_min);
            if slack_min < -tol {
                return fail("boundary slack", slack_min, tol);
            }
        }
        Classification::Singular => {
            let worst = minors.amax();
            map.insert("minor_max".to_string(), worst);
            if worst > tol {
                return fail("singular minors", worst, tol);
            }
            if sol.lambda.abs() > tol {
                return fail("lambda (singular)", sol.lambda.abs(), tol);
            }
        }
    }
    Ok(map)
}
