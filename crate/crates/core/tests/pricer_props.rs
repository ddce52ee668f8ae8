mod common;

use levy_pricer_core::{
    black_scholes_reference, make_contour, price_quadrature, price_series, ContourKind, Error, GaussianParams,
    MarketSpec, SamplingPlan,
};

fn market(k: f64) -> MarketSpec {
    MarketSpec::new(100.0, k, 0.1, 0.5).unwrap()
}

fn oracle(k: f64) -> f64 {
    price_quadrature(&common::model(), &market(k), 3.0, 400.0, 1e-9).unwrap().price
}

#[test]
fn vanishing_strike_pays_the_spot() {
    let p = price_quadrature(&common::model(), &market(1e-9), 3.0, 400.0, 1e-9).unwrap();
    assert!((p.price - 100.0).abs() < 1e-4, "{}", p.price);
}

#[test]
fn gaussian_matches_black_scholes() {
    let vol = 0.25;
    let g = GaussianParams::risk_neutral(vol, 0.1).unwrap();
    for k in [90.0, 100.0, 110.0] {
        let got = price_quadrature(&g, &market(k), 2.0, 200.0, 1e-9).unwrap().price;
        let want = black_scholes_reference(&market(k), vol);
        assert!((got - want).abs() < 1e-6, "K={k}: {got} vs {want}");
    }
}

#[test]
fn decreasing_in_strike_within_bounds() {
    let prices: Vec<(f64, f64)> = (0..5).map(|j| 80.0 + 10.0 * j as f64).map(|k| (k, oracle(k))).collect();
    for w in prices.windows(2) {
        assert!(w[1].1 < w[0].1);
    }
    for (k, c) in prices {
        let intrinsic = (100.0 - k * (-0.05f64).exp()).max(0.0);
        assert!(c >= intrinsic - 5e-3 && c <= 100.0, "K={k}: {c}");
    }
}

#[test]
fn increasing_in_maturity() {
    let p = common::model();
    let v: Vec<f64> = [0.25, 0.5, 1.0]
        .iter()
        .map(|&t| {
            let m = MarketSpec::new(100.0, 100.0, 0.1, t).unwrap();
            price_quadrature(&p, &m, 3.0, 400.0, 1e-9).unwrap().price
        })
        .collect();
    assert!(v[0] < v[1] && v[1] < v[2], "{v:?}");
}

#[test]
fn flat_series_matches_oracle() {
    let plan = common::plan();
    let c = make_contour(ContourKind::Flat, 3.0).unwrap();
    for k in [80.0, 90.0, 100.0, 110.0, 120.0] {
        let s = price_series(&common::model(), &c, &market(k), &plan).unwrap();
        assert!((s.price - oracle(k)).abs() < 1e-4, "K={k}");
        assert!(s.residue <= 1e-9 * s.price.max(1.0));
    }
}

#[test]
fn deformed_series_at_and_above_the_money() {
    let plan = common::plan();
    let c = make_contour(ContourKind::Parabola, 3.0).unwrap();
    for k in [100.0, 110.0, 120.0] {
        let s = price_series(&common::model(), &c, &market(k), &plan).unwrap();
        assert!((s.price - oracle(k)).abs() < 1e-4, "K={k}: {}", s.price);
    }
}

#[test]
fn deep_in_the_money_deformed_series_reports_divergence() {
    let plan = common::plan();
    let c = make_contour(ContourKind::Cosh, 3.0).unwrap();
    let r = price_series(&common::model(), &c, &market(80.0), &plan);
    assert!(matches!(r, Err(Error::SeriesDiverged { .. })), "{r:?}");
}

#[test]
fn refining_the_plan_does_not_hurt() {
    let c = make_contour(ContourKind::Flat, 3.0).unwrap();
    let want = oracle(100.0);
    let coarse = SamplingPlan::new(5.862132863, 50.0, 3.0, 1e-4, 2.0).unwrap();
    let fine = SamplingPlan::new(2.0 * 5.862132863, 50.0, 3.0, 1e-4, 2.0).unwrap();
    let e1 = (price_series(&common::model(), &c, &market(100.0), &coarse).unwrap().price - want).abs();
    let e2 = (price_series(&common::model(), &c, &market(100.0), &fine).unwrap().price - want).abs();
    assert!(e2 <= 1.1 * e1, "{e1:e} -> {e2:e}");
}

#[test]
fn legs_sum_to_the_price() {
    let s = price_series(
        &common::model(),
        &make_contour(ContourKind::Flat, 3.0).unwrap(),
        &market(100.0),
        &common::plan(),
    )
    .unwrap();
    assert!(((s.i1 + s.i2).re - s.price).abs() < 1e-12);
    let q = price_quadrature(&common::model(), &market(100.0), 3.0, 400.0, 1e-9).unwrap();
    assert!((q.i1.re + q.i2.re - q.price).abs() < 1e-12 && q.i1.re > 0.0 && q.i2.re < 0.0);
}

#[test]
fn damping_must_exceed_one() {
    let r = price_quadrature(&common::model(), &market(100.0), 0.5, 50.0, 1e-8);
    assert!(matches!(r, Err(Error::StripViolation { .. })));
    assert!(make_contour(ContourKind::Flat, 1.0).is_err());
}

#[test]
fn strike_outside_the_band_is_rejected() {
    let r = price_series(
        &common::model(),
        &make_contour(ContourKind::Flat, 3.0).unwrap(),
        &market(1e-6),
        &common::plan(),
    );
    assert!(matches!(r, Err(Error::Domain(_))));
}

#[test]
fn invalid_markets() {
    assert!(MarketSpec::new(-1.0, 100.0, 0.1, 0.5).is_err());
    assert!(MarketSpec::new(100.0, 0.0, 0.1, 0.5).is_err());
    assert!(MarketSpec::new(100.0, 100.0, -0.1, 0.5).is_err());
    assert!(MarketSpec::new(100.0, 100.0, 0.1, 0.0).is_err());
}
