mod common;

use std::f64::consts::PI;

use common::{DELTA, M_BENCH, SIGMA_TABLE, TAIL_TABLE};
use levy_pricer_core::{
    best_approx_bound, compute_m, make_plan, sigma_for_eps, tail_eps, CharacteristicExponent, Complex64, ErrorBudget,
    PlanRequest,
};

#[test]
fn sigma_and_step_table() {
    for (eps, sigma, h) in SIGMA_TABLE {
        let (s, step) = sigma_for_eps(M_BENCH, DELTA, eps).unwrap();
        assert!((s - sigma).abs() < 1e-6, "ε={eps:e}: σ={s}");
        assert!((step - h).abs() < 1e-6, "ε={eps:e}: h={step}");
        assert!((best_approx_bound(M_BENCH, DELTA, s) / eps - 1.0).abs() < 1e-12);
    }
}

#[test]
fn tail_table() {
    let p = common::model();
    for (i, (a, want)) in TAIL_TABLE.iter().enumerate() {
        let got = tail_eps(&p, common::T, *a, common::ALPHA).unwrap();
        let tol = if i >= 11 { 1e-2 } else { 1e-3 };
        assert!((got / want - 1.0).abs() < tol, "A={a}: {got:e} vs {want:e}");
    }
}

#[test]
fn tail_decays_geometrically() {
    let p = common::model();
    let tails: Vec<f64> = TAIL_TABLE
        .iter()
        .map(|(a, _)| tail_eps(&p, common::T, *a, common::ALPHA).unwrap())
        .collect();
    for w in tails.windows(2) {
        let ratio = w[1] / w[0];
        assert!(ratio > 0.05 && ratio < 0.5, "{ratio}");
    }
}

#[test]
fn strip_bound_matches_grid_search() {
    let p = common::model();
    let alpha = 3.0;
    let delta = 1.0;
    let got = compute_m(&p, alpha, delta, common::T).unwrap();
    let mut best = 0.0f64;
    for line in [alpha + delta, alpha - delta] {
        for j in 0..=100_000 {
            let x = -100.0 + 2e-3 * j as f64;
            let v = (-p.psi(Complex64::new(x, line)).unwrap() * common::T).exp().re.abs();
            best = best.max(v);
        }
    }
    assert!((got.m - best).abs() < 1e-6, "{} vs {best}", got.m);
}

#[test]
fn strip_bound_benchmark() {
    let b = compute_m(&common::model(), 3.0, 2.0, 0.5).unwrap();
    assert!((b.m - 9.702279703).abs() < 1e-6);
}

#[test]
fn plan_composition() {
    let p = common::model();
    let req = PlanRequest {
        maturity: common::T,
        alpha_plus: Some(3.0),
        epsilon: 1e-4,
        truncation: 40.0,
        delta: None,
    };
    let (plan, budget) = make_plan(&p, &req).unwrap();
    assert_eq!(plan.alpha_plus + plan.delta, p.lambda_plus);
    let want = 40.0 * 1e-4 / PI + 1.138385230e-4;
    assert!((budget.eps_total / want - 1.0).abs() < 1e-3);
    assert_eq!(plan.n as f64, (40.0 * plan.sigma / PI).ceil());
}

#[test]
fn benchmark_plan() {
    let req = PlanRequest {
        maturity: common::T,
        alpha_plus: None,
        epsilon: 1e-7,
        truncation: 50.0,
        delta: None,
    };
    let (plan, budget) = make_plan(&common::model(), &req).unwrap();
    assert_eq!(plan.n, 149);
    assert!((budget.eps_total / common::EPS_TOTAL - 1.0).abs() < 1e-3);
    assert!((budget.m - M_BENCH).abs() < 1e-6);
}

#[test]
fn vanishing_budget() {
    let p = common::model();
    let tail = tail_eps(&p, common::T, 1e6, common::ALPHA).unwrap();
    assert_eq!(tail, 0.0);
    assert_eq!(ErrorBudget::compose(0.0, tail, 1e6, M_BENCH).unwrap().eps_total, 0.0);
}
