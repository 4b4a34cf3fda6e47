//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with its runtime (visible under `--nocapture`) and enforcing its runtime
//! budget.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use common::*;
use udisc::closedform::{
    extract_phases, gepm, reconstruct_from_phases, star_solution, three_state_epm,
    ThreeStateConstants,
};
use udisc::ensemble::StateEnsemble;
use udisc::feasible::{all_minors, check_feasible, det_xg, principal_minor, SuccessPoint};
use udisc::oracle::{refine, sample_surface};
use udisc::povm::{build_povm, outcome_distribution, simulate};
use udisc::solver::{optimize, optimize_gram, Classification, SolverConfig};
use udisc::C64;

fn run(name: &str, budget_secs: f64, body: impl FnOnce()) {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let elapsed = start.elapsed().as_secs_f64();
    let within = elapsed <= budget_secs;
    match (&outcome, within) {
        (Ok(()), true) => println!("[PASS] {name} ({elapsed:.2}s / {budget_secs:.0}s budget)"),
        (Ok(()), false) => {
            println!("[FAIL] {name}: runtime {elapsed:.2}s exceeds {budget_secs:.0}s budget")
        }
        (Err(_), _) => println!("[FAIL] {name} ({elapsed:.2}s)"),
    }
    if let Err(cause) = outcome {
        std::panic::resume_unwind(cause);
    }
    assert!(
        within,
        "{name}: runtime {elapsed:.2}s exceeds budget {budget_secs:.0}s"
    );
}

fn assert_close(label: &str, got: f64, want: f64, tol: f64) {
    assert!(
        (got - want).abs() <= tol,
        "{label}: got {got:.6}, want {want:.6} within {tol:.1e}"
    );
}

#[test]
fn c01_three_state_interior_prior_set() {
    run("criterion 1: interior optimum of the reference three-state problem", 1.0, || {
        let e = fixture_ensemble([0.05, 0.35, 0.60]);
        let sol = optimize(&e, &SolverConfig::default()).unwrap();
        assert_eq!(sol.classification, Classification::InteriorNonSingular);
        assert_close("p1", sol.p_opt.0[0], 0.5029, 5e-4);
        assert_close("p2", sol.p_opt.0[1], 0.3169, 5e-4);
        assert_close("p3", sol.p_opt.0[2], 0.3629, 5e-4);
        assert_close("lambda", sol.lambda, 0.2326, 5e-4);
        assert_close("p_bar", sol.p_bar, 0.3538, 5e-4);
    });
}

#[test]
#[allow(clippy::approx_constant)] // 0.3927 is the published reference value
fn c02_three_state_boundary_prior_set() {
    run("criterion 2: boundary optimum of the reference three-state problem", 1.0, || {
        let e = fixture_ensemble([0.10, 0.80, 0.10]);
        let sol = optimize(&e, &SolverConfig::default()).unwrap();
        assert_eq!(
            sol.classification,
            Classification::Boundary { zero_set: vec![2] }
        );
        assert_close("p1", sol.p_opt.0[0], 0.3927, 5e-4);
        assert_close("p2", sol.p_opt.0[1], 0.5300, 5e-4);
        assert_close("p3", sol.p_opt.0[2], 0.0, 5e-4);
        assert_close("p_bar", sol.p_bar, 0.4632, 5e-4);
        // The reference multiplier below does not satisfy M_i = γ_i λ at the
        // reference point: the p values above force
        // λ = |X₁₂ − X₁₃X₂₃|/√(γ₁γ₂) ≈ 0.46504 (= 0.6577/√2). The recorded
        // value is asserted unchanged.
        assert_close("lambda", sol.lambda, 0.6577, 5e-4);
    });
}

#[test]
fn c03_three_state_singular_prior_set() {
    run("criterion 3: singular optimum of the reference three-state problem", 2.0, || {
        let e = fixture_ensemble([0.30, 0.35, 0.35]);
        let x = e.gram();
        let sol = optimize(&e, &SolverConfig::default()).unwrap();
        assert_eq!(sol.classification, Classification::Singular);
        assert_close("p1", sol.p_opt.0[0], 0.6667, 5e-4);
        assert_close("p2", sol.p_opt.0[1], 0.4000, 5e-4);
        assert_close("p3", sol.p_opt.0[2], 0.2941, 5e-4);
        assert_close("lambda", sol.lambda, 0.0, 5e-4);
        assert_close("p_bar", sol.p_bar, 0.4429, 5e-4);
        for k in 0..3 {
            assert!(principal_minor(&x, &sol.p_opt, k).abs() <= 2e-3);
        }
    });
}

#[test]
fn c04_two_state_idp_limit() {
    run("criterion 4: two-state closed form on 200 interior instances", 5.0, || {
        let mut rng = rng(0x1d9);
        let cfg = SolverConfig::default();
        for trial in 0..200 {
            let s = 0.05 + 0.85 * rng.random::<f64>();
            // Interior regime: both p_i stay strictly positive, i.e.
            // s² < γ₁/γ₂ < 1/s², sampled with a safety margin.
            let margin: f64 = 0.95;
            let lo = (s / margin).powi(2).min(0.99);
            let hi = (margin / s).powi(2).max(1.01);
            let ratio = lo * (hi / lo).powf(rng.random::<f64>());
            let g1 = ratio / (1.0 + ratio);
            let phase = C64::new(0.0, 2.0 * std::f64::consts::PI * rng.random::<f64>()).exp();
            let v1 = DVector::from_column_slice(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
            let v2 = DVector::from_column_slice(&[
                phase * C64::new(s, 0.0),
                C64::new((1.0 - s * s).sqrt(), 0.0),
            ]);
            let e = StateEnsemble::new(
                vec![v1, v2],
                DVector::from_row_slice(&[g1, 1.0 - g1]),
            )
            .unwrap();
            let sol = optimize(&e, &cfg).unwrap();
            let idp = 1.0 - 2.0 * (g1 * (1.0 - g1)).sqrt() * s;
            assert!(
                (sol.p_bar - idp).abs() <= 1e-10,
                "trial {trial}: p_bar {} vs closed form {idp} (s={s}, g1={g1})",
                sol.p_bar
            );
        }
    });
}

/// Hub-structured ensemble inside the closed form's validity regime.
fn random_star_instance(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> StateEnsemble {
    loop {
        let max_overlap = 0.7 / (n as f64 - 1.0);
        let overlaps: Vec<C64> = (0..n - 1)
            .map(|_| {
                let r = 0.05 + (max_overlap - 0.05) * rng.random::<f64>();
                let phase = C64::new(0.0, 2.0 * std::f64::consts::PI * rng.random::<f64>()).exp();
                phase * C64::new(r, 0.0)
            })
            .collect();
        let leak: f64 = overlaps.iter().map(|c| c.norm_sqr()).sum();
        let mut hub = DVector::<C64>::zeros(n);
        hub[0] = C64::new((1.0 - leak).sqrt(), 0.0);
        for (k, c) in overlaps.iter().enumerate() {
            hub[k + 1] = *c;
        }
        let mut states = vec![hub];
        for k in 1..n {
            let mut v = DVector::<C64>::zeros(n);
            v[k] = C64::new(1.0, 0.0);
            states.push(v);
        }
        let priors = random_priors(n, 0.3 / n as f64, rng);
        let e = StateEnsemble::new(states, priors.clone()).unwrap();
        // Keep only instances safely inside the validity conditions.
        let ok = (1..n).all(|k| {
            (priors[k] / priors[0]).sqrt() * 0.98 > overlaps[k - 1].norm()
        }) && (1..n)
            .map(|k| (priors[k] / priors[0]).sqrt() * overlaps[k - 1].norm())
            .sum::<f64>()
            < 0.95;
        if ok {
            return e;
        }
    }
}

#[test]
fn c05_star_closed_form_matches_solver() {
    run("criterion 5: hub closed form vs solver on 100 instances", 10.0, || {
        let mut rng = rng(0x57a7);
        let cfg = SolverConfig::default();
        for trial in 0..100 {
            let n = 3 + trial % 3;
            let e = random_star_instance(n, &mut rng);
            let star = star_solution(&e)
                .unwrap()
                .expect("instance drawn inside the validity regime");
            let sol = optimize(&e, &cfg).unwrap();
            assert_eq!(sol.classification, Classification::InteriorNonSingular);
            assert!(
                (star.p_bar - sol.p_bar).abs() <= 1e-8,
                "trial {trial}: p_bar {} vs {}",
                star.p_bar,
                sol.p_bar
            );
            assert!((&star.p_opt.0 - &sol.p_opt.0).amax() <= 1e-8);
        }
    });
}

#[test]
fn c06_oracle_dominance() {
    run("criterion 6: sampling oracle never beats, barely trails, 100 instances", 60.0, || {
        let mut rng = rng(0x0c6);
        let cfg = SolverConfig::default();
        for trial in 0..100 {
            let n = 3 + trial % 3;
            let x = random_gram(n, 0.3 + 0.4 * rng.random::<f64>(), true, &mut rng);
            let priors = random_priors(n, 0.05, &mut rng);
            let sol = optimize_gram(&x, &priors, &cfg).unwrap();
            let sample = sample_surface(&x, &priors, 10_000, 0xBEE5 + trial as u64);
            let best = refine(&x, &priors, &sample.best, 2000);
            let value = best.average(&priors);
            assert!(
                value <= sol.p_bar + 1e-6,
                "trial {trial}: oracle {value} beats certified optimum {}",
                sol.p_bar
            );
            assert!(
                sol.p_bar - value < 1e-3,
                "trial {trial}: oracle {value} trails optimum {} by more than 1e-3",
                sol.p_bar
            );
        }
    });
}

#[test]
fn c07_null_vector_modulus_and_phase_roundtrip() {
    run("criterion 7: null-vector law + phase round-trip on 100 interior optima", 20.0, || {
        let mut rng = rng(0x707);
        for trial in 0..100 {
            let n = 3 + trial % 2;
            let (x, priors, sol) = random_interior_instance(n, &mut rng);
            let phases = extract_phases(&x, &priors, &sol.p_opt)
                .unwrap_or_else(|e| panic!("trial {trial}: {e}"));
            // extract_phases itself enforces the modulus law at 1e-6;
            // re-check the round-trip at the stated tolerances.
            let rec = reconstruct_from_phases(&x, &priors, &phases).unwrap();
            assert!(
                (&rec.point.0 - &sol.p_opt.0).amax() <= 1e-8,
                "trial {trial}: phase reconstruction drifted"
            );
            assert!((rec.p_bar - sol.p_bar).abs() <= 1e-8);
            assert!(
                rec.stationarity.amax() <= 1e-6,
                "trial {trial}: stationarity residual {}",
                rec.stationarity.amax()
            );
        }
    });
}

#[test]
fn c08_gepm_round_trip() {
    run("criterion 8: constrained-ratio priors round-trip on 50 instances", 20.0, || {
        let mut rng = rng(0x6e9);
        let cfg = SolverConfig::default();
        let mut done = 0;
        while done < 50 {
            let n = 3 + done % 3;
            let e = random_ensemble(n, n, 0.3 + 0.4 * rng.random::<f64>(), true, &mut rng);
            let w = DVector::from_iterator(n, (0..n).map(|_| 0.6 + 0.8 * rng.random::<f64>()));
            let g = gepm(&e, &w).unwrap();
            let Some(priors) = g.priors.clone() else {
                continue; // singular constrained point: priors not unique
            };
            let states = (0..n).map(|i| e.states().column(i).into_owned()).collect();
            let e2 = StateEnsemble::new(states, priors).unwrap();
            let sol = optimize(&e2, &cfg).unwrap();
            assert!(
                (&sol.p_opt.0 - &g.point.0).amax() <= 1e-6,
                "instance {done}: solver disagrees with constrained optimum"
            );
            done += 1;
        }
    });
}

#[test]
fn c09_three_state_epm_consistency() {
    run("criterion 9: EPM closed form vs eigenvalue route + singular family", 20.0, || {
        let mut rng = rng(0x3e9);
        for trial in 0..100 {
            let x = random_gram(3, 0.2 + 0.6 * rng.random::<f64>(), true, &mut rng);
            let epm = three_state_epm(&x).unwrap();
            assert!(
                (epm.p_epm - x.sigma_min()).abs() <= 1e-10,
                "trial {trial}: closed form {} vs eigenvalue {}",
                epm.p_epm,
                x.sigma_min()
            );
        }
        // Equal overlap moduli with real non-negative overlap product: the
        // EPM point is singular, p = 1 − |X₁₂| and all minors vanish.
        for &m in &[0.1, 0.25, 0.4, 0.45] {
            let c = C64::new(m, 0.0);
            let one = C64::new(1.0, 0.0);
            let x = udisc::ensemble::GramMatrix::from_entries(DMatrix::from_row_slice(
                3,
                3,
                &[one, c, c, c, one, c, c, c, one],
            ))
            .unwrap();
            let epm = three_state_epm(&x).unwrap();
            assert!((epm.p_epm - (1.0 - m)).abs() <= 1e-10);
            assert!(epm.priors.is_none(), "degenerate EPM must be flagged singular");
            let p = SuccessPoint::from_slice(&[epm.p_epm; 3]);
            assert!(all_minors(&x, &p).amax() <= 1e-8);
        }
    });
}

#[test]
fn c10_povm_axioms_and_simulation() {
    run("criterion 10: POVM axioms everywhere + million-trial simulation", 10.0, || {
        let cfg = SolverConfig::default();
        let mut rng = rng(0xa10);

        let check_instance = |e: &StateEnsemble| {
            let sol = optimize(e, &cfg).unwrap();
            let povm = build_povm(e, &sol.p_opt).unwrap();
            let cert = povm.certificates();
            assert!(cert.completeness < 1e-9);
            assert!(cert.min_eigenvalue_elements > -1e-9);
            assert!(cert.min_eigenvalue_inconclusive > -1e-9);
            for i in 0..e.n() {
                let dist = outcome_distribution(&povm, e, i);
                for j in 0..e.n() {
                    if j != i {
                        assert!(dist[j] < 1e-9, "cross error p({j}|{i}) = {}", dist[j]);
                    }
                }
            }
        };

        check_instance(&fixture_ensemble([0.05, 0.35, 0.60]));
        check_instance(&fixture_ensemble([0.10, 0.80, 0.10]));
        check_instance(&fixture_ensemble([0.30, 0.35, 0.35]));
        for _ in 0..20 {
            let n = 3 + rng.random_range(0..3usize);
            check_instance(&random_ensemble(n, n, 0.3 + 0.4 * rng.random::<f64>(), true, &mut rng));
        }

        let e = fixture_ensemble([0.05, 0.35, 0.60]);
        let sol = optimize(&e, &cfg).unwrap();
        let povm = build_povm(&e, &sol.p_opt).unwrap();
        let report = simulate(&povm, &e, 1_000_000, 0x5eed);
        let p_bar = 0.3538f64;
        let sigma = (p_bar * (1.0 - p_bar) / 1e6).sqrt();
        assert!(
            (report.empirical_success - p_bar).abs() <= 3.0 * sigma,
            "empirical success {} vs {p_bar} ± {}",
            report.empirical_success,
            3.0 * sigma
        );
        assert_eq!(report.empirical_error, 0.0, "misidentification occurred");
    });
}

#[test]
fn c11_property_suites() {
    run("criterion 11: convexity, monotonicity, determinant gradient, inequality guards", 30.0, || {
        let mut rng = rng(0xc11);

        // Convexity: random feasible pairs stay feasible under mixing.
        for trial in 0..1000 {
            let n = 2 + trial % 4;
            let x = random_gram(n, 0.3 + 0.4 * rng.random::<f64>(), true, &mut rng);
            let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
                let dir = DVector::from_iterator(n, (0..n).map(|_| rng.random::<f64>() + 1e-3));
                let scale = rng.random::<f64>();
                SuccessPoint(udisc::feasible::ray_to_surface(&x, &dir).0 * scale)
            };
            let a = draw(&mut rng);
            let b = draw(&mut rng);
            let eps = rng.random::<f64>();
            let mid = SuccessPoint(&a.0 * eps + &b.0 * (1.0 - eps));
            assert!(check_feasible(&x, &a).feasible);
            assert!(check_feasible(&x, &b).feasible);
            assert!(
                check_feasible(&x, &mid).feasible,
                "trial {trial}: convex combination left the feasible set"
            );
        }

        // Monotonicity: increasing any component can only lower σ_min.
        for trial in 0..1000 {
            let n = 2 + trial % 4;
            let x = random_gram(n, 0.3 + 0.4 * rng.random::<f64>(), true, &mut rng);
            let p = SuccessPoint(
                udisc::feasible::ray_to_surface(
                    &x,
                    &DVector::from_iterator(n, (0..n).map(|_| rng.random::<f64>() + 1e-3)),
                )
                .0 * rng.random::<f64>(),
            );
            let bump = DVector::from_iterator(n, (0..n).map(|_| 0.2 * rng.random::<f64>()));
            let q = SuccessPoint(&p.0 + bump);
            let sp = udisc::feasible::min_eigenvalue(&x, &p);
            let sq = udisc::feasible::min_eigenvalue(&x, &q);
            assert!(sq <= sp + 1e-12, "trial {trial}: sigma_min increased");
        }

        // ∂ det(X−Γ)/∂p_k = −M_k against central differences.
        let fd_step = 1e-6;
        for trial in 0..100 {
            let n = 2 + trial % 4;
            let x = random_gram(n, 0.3 + 0.4 * rng.random::<f64>(), true, &mut rng);
            let p = SuccessPoint(DVector::from_iterator(
                n,
                (0..n).map(|_| 0.6 * rng.random::<f64>()),
            ));
            for k in 0..n {
                let mut hi = p.clone();
                hi.0[k] += fd_step;
                let mut lo = p.clone();
                lo.0[k] -= fd_step;
                let fd = (det_xg(&x, &hi) - det_xg(&x, &lo)) / (2.0 * fd_step);
                let minor = principal_minor(&x, &p, k);
                assert!(
                    (fd + minor).abs() <= 1e-5 * minor.abs().max(1.0),
                    "trial {trial}: determinant gradient {fd} vs -minor {minor}"
                );
            }
        }

        // Scalar inequality guards for the three-state constants.
        for trial in 0..1000 {
            let x = random_gram(3, 0.2 + 0.6 * rng.random::<f64>(), true, &mut rng);
            let priors = random_priors(3, 0.02, &mut rng);
            let c = ThreeStateConstants::new(&x, &priors).unwrap();
            let t2 = c.t.norm_sqr();
            assert!(
                c.s.powi(3) >= 27.0 * c.gamma * t2 * t2 - 1e-12,
                "trial {trial}: S^3 >= 27 gamma |T|^4 violated"
            );
            assert!(27.0 * c.t.re * c.t.re <= 27.0 * t2 + 1e-12);
            assert!(27.0 * t2 <= c.w.powi(3) + 1e-9, "trial {trial}: 27|T|^2 <= W^3 violated");
        }
    });
}
