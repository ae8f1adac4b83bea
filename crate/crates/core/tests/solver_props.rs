mod common;

use common::*;
use corrlift::corpus::{coprime_pair, planted_pair, random_factor};
use corrlift::sensing::{build_sensing, measure};
use corrlift::solver::{
    aligned_mse, extract_rank1, gradient, objective_value, recover, solve, SolverResult,
};
use corrlift::{HermitianMatrix, Signal, SolverOptions, C64};

fn stacked_signal(x1: &Signal, x2: &Signal) -> Signal {
    Signal::new(stack(x1, x2)).unwrap()
}

fn result_of(x: HermitianMatrix) -> SolverResult {
    SolverResult {
        x_mat: x,
        iters: 0,
        residual: 0.0,
        rank1_gap: 0.0,
        objective: 0.0,
        history: vec![],
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = rng(51);
    for (l1, l2) in [(2, 2), (2, 3), (3, 4)] {
        let s = build_sensing(l1, l2).unwrap();
        let (x1, x2) = coprime_pair(l1, l2, 0.0, &mut rng);
        let b = measure(&x1, &x2);
        let x = random_hermitian(s.n(), &mut rng);
        let g = gradient(&s, &b, &x).unwrap();
        for _ in 0..10 {
            let d = random_hermitian(s.n(), &mut rng);
            let d = d.scale(1.0 / d.frobenius_norm());
            let h = 1e-5;
            let fp = objective_value(&s, &b, &x.axpy(h, &d)).unwrap();
            let fm = objective_value(&s, &b, &x.axpy(-h, &d)).unwrap();
            let fd = (fp - fm) / (2.0 * h);
            let an = g.inner(&d);
            assert!(
                (fd - an).abs() <= 1e-5 * an.abs().max(g.frobenius_norm()),
                "{fd} vs {an}"
            );
        }
    }
}

#[test]
fn homogeneous_in_the_measurements() {
    let mut rng = rng(52);
    let s = build_sensing(2, 3).unwrap();
    let (x1, x2) = coprime_pair(2, 3, 0.0, &mut rng);
    let b = measure(&x1, &x2);
    let opts = SolverOptions::default();
    let r1 = solve(&s, &b, &opts).unwrap();
    let r4 = solve(&s, &b.scale(4.0), &opts).unwrap();
    assert_eq!(r1.iters, r4.iters);
    assert!(
        r4.x_mat.sub(&r1.x_mat.scale(4.0)).frobenius_norm() <= 1e-12 * r4.x_mat.frobenius_norm()
    );
}

#[test]
fn objective_is_monotone_and_iterate_psd() {
    let mut rng = rng(53);
    for (l1, l2) in [(2, 2), (3, 3), (2, 4)] {
        let s = build_sensing(l1, l2).unwrap();
        let (x1, x2) = coprime_pair(l1, l2, 0.0, &mut rng);
        let b = measure(&x1, &x2);
        let r = solve(&s, &b, &SolverOptions::default()).unwrap();
        let slack =
            64.0 * f64::EPSILON * 2.0 * b.stacked(false).iter().map(|z| z.norm_sqr()).sum::<f64>();
        for w in r.history.windows(2) {
            assert!(w[1] <= w[0] + slack);
        }
        assert_eq!(r.history.len(), r.iters + 1);
        assert!(r.x_mat.min_eigenvalue().unwrap() >= -1e-9);
    }
}

#[test]
fn forced_restarts_still_converge() {
    let mut rng = rng(54);
    let s = build_sensing(3, 3).unwrap();
    let (x1, x2) = coprime_pair(3, 3, 0.0, &mut rng);
    let opts = SolverOptions {
        restart_every: Some(50),
        ..SolverOptions::default()
    };
    let (e1, e2, _) = recover(3, 3, &s, &measure(&x1, &x2), &opts).unwrap();
    let mse = aligned_mse(&stacked_signal(&x1, &x2), &stacked_signal(&e1, &e2))
        .unwrap()
        .0;
    assert!(mse <= 1e-5);
}

#[test]
fn rank_one_extraction() {
    let mut rng = rng(55);
    let x = random_signal(5, &mut rng);
    let e = extract_rank1(&result_of(HermitianMatrix::outer(x.coeffs()))).unwrap();
    assert!(!e.nonpositive && !e.degenerate);
    assert!(aligned_mse(&x, &e.signal).unwrap().0 <= 1e-20);
    for eps in [1e-6, 1e-4, 1e-2] {
        let noise = random_hermitian(5, &mut rng);
        let noise = noise.scale(eps / noise.frobenius_norm());
        for pert in [HermitianMatrix::identity(5).scale(eps), noise] {
            let e =
                extract_rank1(&result_of(HermitianMatrix::outer(x.coeffs()).add(&pert))).unwrap();
            let (mse, _) = aligned_mse(&x, &e.signal).unwrap();
            assert!(
                mse.sqrt() * x.norm() <= 10.0 * eps,
                "eps {eps}: {}",
                mse.sqrt()
            );
        }
    }
    let z = extract_rank1(&result_of(HermitianMatrix::zeros(4))).unwrap();
    assert!(z.nonpositive && z.signal.is_zero());
    let tie = extract_rank1(&result_of(HermitianMatrix::identity(3))).unwrap();
    assert!(tie.degenerate);
}

#[test]
fn aligned_mse_matches_phase_search() {
    let mut rng = rng(56);
    for _ in 0..20 {
        let x = random_signal(5, &mut rng);
        let y = random_signal(5, &mut rng);
        let (mse, phi) = aligned_mse(&x, &y).unwrap();
        let err =
            |p: f64| x.sub(&y.scale(C64::from_polar(1.0, p))).norm().powi(2) / x.norm().powi(2);
        let step = std::f64::consts::TAU / 720.0;
        let best = (0..720)
            .map(|k| k as f64 * step)
            .min_by(|a, b| err(*a).total_cmp(&err(*b)))
            .unwrap();
        // golden-section refinement inside the winning grid cell
        let (mut lo, mut hi) = (best - step, best + step);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..80 {
            let (a, b) = (hi - g * (hi - lo), lo + g * (hi - lo));
            if err(a) < err(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        let refined = err(0.5 * (lo + hi));
        assert!(mse <= err(best) + 1e-12);
        assert!((refined - mse).abs() <= 1e-9, "{refined} vs {mse}");
        assert!((err(phi) - mse).abs() <= 1e-12);
    }
}

#[test]
fn noiseless_recovery_corpus() {
    let mut rng = rng(57);
    let opts = SolverOptions::default();
    for t in 0..100 {
        let (l1, l2) = (2 + t % 4, 2 + (t / 4) % 4);
        let s = build_sensing(l1, l2).unwrap();
        let (x1, x2) = coprime_pair(l1, l2, 0.0, &mut rng);
        let (e1, e2, diag) = recover(l1, l2, &s, &measure(&x1, &x2), &opts).unwrap();
        let mse = aligned_mse(&stacked_signal(&x1, &x2), &stacked_signal(&e1, &e2))
            .unwrap()
            .0;
        assert!(mse <= 1e-5, "trial {t} ({l1},{l2}): {mse:e}");
        assert_eq!(diag.gcd_degree, Some(1), "{diag:?}");
    }
}

#[test]
fn two_by_two_reaches_rank_one() {
    let mut rng = rng(62);
    let s = build_sensing(2, 2).unwrap();
    for _ in 0..10 {
        let (x1, x2) = coprime_pair(2, 2, 0.0, &mut rng);
        let r = solve(&s, &measure(&x1, &x2), &SolverOptions::default()).unwrap();
        assert!(
            r.residual <= 1e-8 && r.rank1_gap <= 1e-6,
            "{} {}",
            r.residual,
            r.rank1_gap
        );
    }
}

#[test]
fn small_pair_example() {
    let mut rng = rng(58);
    let s = build_sensing(2, 3).unwrap();
    let (x1, x2) = coprime_pair(2, 3, 0.0, &mut rng);
    let (e1, e2, diag) = recover(2, 3, &s, &measure(&x1, &x2), &SolverOptions::default()).unwrap();
    assert_eq!((e1.len(), e2.len()), (2, 3));
    assert!(
        aligned_mse(&stacked_signal(&x1, &x2), &stacked_signal(&e1, &e2))
            .unwrap()
            .0
            <= 1e-5
    );
    assert_eq!(diag.gcd_degree, Some(1));
}

#[test]
fn common_factor_is_flagged() {
    let mut rng = rng(59);
    for _ in 0..10 {
        let f = random_factor(1, &mut rng);
        let (x1, x2) = planted_pair(&f, 3, 3, 1e-2, &mut rng);
        let s = build_sensing(3, 3).unwrap();
        let (e1, e2, diag) =
            recover(3, 3, &s, &measure(&x1, &x2), &SolverOptions::default()).unwrap();
        let mse = aligned_mse(&stacked_signal(&x1, &x2), &stacked_signal(&e1, &e2))
            .unwrap()
            .0;
        assert!(diag.non_unique, "mse {mse:e} {diag:?}");
        assert!(diag.rank1_gap > 1e-6 || mse > 1e-5 || diag.gcd_degree != Some(1));
    }
}

#[test]
fn reduced_measurements_recover_as_well() {
    let mut rng = rng(60);
    let opts = SolverOptions::default();
    for t in 0..20 {
        let (l1, l2) = (2 + t % 3, 2 + (t / 3) % 3);
        let full = build_sensing(l1, l2).unwrap();
        let reduced = full.reduced();
        let (x1, x2) = coprime_pair(l1, l2, 0.0, &mut rng);
        let b = measure(&x1, &x2);
        let truth = stacked_signal(&x1, &x2);
        let (a1, a2, _) = recover(l1, l2, &full, &b, &opts).unwrap();
        let (r1, r2, _) = recover(l1, l2, &reduced, &b, &opts).unwrap();
        let m_full = aligned_mse(&truth, &stacked_signal(&a1, &a2)).unwrap().0;
        let m_red = aligned_mse(&truth, &stacked_signal(&r1, &r2)).unwrap().0;
        assert!(m_full <= 1e-5 && m_red <= 1e-5, "{m_full:e} {m_red:e}");
    }
}

#[test]
fn global_phase_does_not_matter() {
    let mut rng = rng(61);
    let s = build_sensing(3, 2).unwrap();
    let opts = SolverOptions::default();
    for theta in [0.3, 1.7, -2.9] {
        let (x1, x2) = coprime_pair(3, 2, 0.0, &mut rng);
        let u = C64::from_polar(1.0, theta);
        let (y1, y2) = (x1.scale(u), x2.scale(u));
        let (a1, a2, _) = recover(3, 2, &s, &measure(&x1, &x2), &opts).unwrap();
        let (b1, b2, _) = recover(3, 2, &s, &measure(&y1, &y2), &opts).unwrap();
        let ma = aligned_mse(&stacked_signal(&x1, &x2), &stacked_signal(&a1, &a2))
            .unwrap()
            .0;
        let mb = aligned_mse(&stacked_signal(&y1, &y2), &stacked_signal(&b1, &b2))
            .unwrap()
            .0;
        assert!((ma - mb).abs() <= 1e-10);
    }
}

#[test]
fn dimension_mismatch_is_rejected() {
    let s = build_sensing(2, 2).unwrap();
    let b = measure(&Signal::from_re(&[1., 2., 3.]), &Signal::from_re(&[1., 1.]));
    assert!(solve(&s, &b, &SolverOptions::default()).is_err());
}

#[test]
fn refinement_never_increases_the_objective() {
    let mut rng = rng(63);
    let s = build_sensing(3, 4).unwrap();
    for _ in 0..10 {
        let (x1, x2) = coprime_pair(3, 4, 0.0, &mut rng);
        let b = measure(&x1, &x2);
        let start = random_signal(7, &mut rng);
        let g0 = objective_value(&s, &b, &HermitianMatrix::outer(start.coeffs())).unwrap();
        let (x, g) = corrlift::solver::refine_rank1(&s, &b, &start).unwrap();
        assert!(g <= g0);
        let direct = objective_value(&s, &b, &HermitianMatrix::outer(x.coeffs())).unwrap();
        assert!((direct - g).abs() <= 1e-12 * g0);
    }
}

#[test]
fn refinement_can_be_disabled() {
    let mut rng = rng(64);
    let s = build_sensing(2, 3).unwrap();
    let (x1, x2) = coprime_pair(2, 3, 0.0, &mut rng);
    let b = measure(&x1, &x2);
    let opts = SolverOptions {
        refine: false,
        ..SolverOptions::default()
    };
    let (e1, e2, diag) = recover(2, 3, &s, &b, &opts).unwrap();
    let plain = extract_rank1(&solve(&s, &b, &opts).unwrap())
        .unwrap()
        .signal;
    assert_eq!(stacked_signal(&e1, &e2), plain);
    assert_eq!(diag.residual, solve(&s, &b, &opts).unwrap().residual);
}
