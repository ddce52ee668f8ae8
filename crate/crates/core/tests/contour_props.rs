mod common;

use levy_pricer_core::{
    density_contour, density_quadrature, eval_contour, make_contour, verify_arc_decay, ArcDecayOptions, ContourKind,
    ContourShape, ContourSpec, Error, KoBoLParams,
};
use proptest::prelude::*;

const KINDS: [ContourKind; 3] = [ContourKind::Flat, ContourKind::Parabola, ContourKind::Cosh];

proptest! {
    #[test]
    fn velocity_is_the_derivative(theta in -2.0f64..2.0, alpha in 1.1f64..4.9, kind in 0usize..3) {
        let c = make_contour(KINDS[kind], alpha).unwrap();
        let h = 1e-6;
        let fd = (eval_contour(&c, theta + h).0 - eval_contour(&c, theta - h).0) / (2.0 * h);
        let v = eval_contour(&c, theta).1;
        prop_assert!((fd - v).norm() <= 1e-8 * v.norm().max(1.0) * 10.0);
    }

    #[test]
    fn offset_sits_on_the_imaginary_part(theta in -3.0f64..3.0, alpha in 1.1f64..4.9, kind in 0usize..3) {
        let c = make_contour(KINDS[kind], alpha).unwrap();
        let (p, _) = eval_contour(&c, theta);
        prop_assert_eq!(p.re, theta);
        prop_assert!(p.im >= alpha);
    }
}

struct SinhQuartic;

impl ContourShape for SinhQuartic {
    fn f(&self, t: f64) -> f64 {
        t.sinh()
    }
    fn df(&self, t: f64) -> f64 {
        t.cosh()
    }
    fn bump(&self, t: f64) -> f64 {
        0.1 * t.powi(4)
    }
    fn dbump(&self, t: f64) -> f64 {
        0.4 * t.powi(3)
    }
}

struct WrongSign;

impl ContourShape for WrongSign {
    fn f(&self, t: f64) -> f64 {
        -t
    }
    fn df(&self, _: f64) -> f64 {
        -1.0
    }
    fn bump(&self, _: f64) -> f64 {
        0.0
    }
    fn dbump(&self, _: f64) -> f64 {
        0.0
    }
}

#[test]
fn custom_contour_reproduces_density() {
    let p = common::model();
    let c = ContourSpec::custom(3.0, SinhQuartic).unwrap();
    let d = density_contour(&p, &c, 0.5, 0.5, 8.0, 1e-11).unwrap();
    let q = density_quadrature(&p, 0.5, 0.5, 3.0, 400.0, 1e-11).unwrap();
    assert!((d.value - q.value).abs() < 1e-7, "{} vs {}", d.value, q.value);
}

#[test]
fn custom_contour_invariants_are_checked() {
    assert!(matches!(
        ContourSpec::custom(3.0, WrongSign),
        Err(Error::ContourInvariant { .. })
    ));
}

#[test]
fn flat_arcs_decay_for_nonnegative_y() {
    let p = common::model();
    let c = make_contour(ContourKind::Flat, 3.0).unwrap();
    for y in [0.0, 0.25, 0.5, 1.0, 2.0] {
        let rep = verify_arc_decay(&p, &c, y, 0.5, &[10.0, 20.0, 40.0, 80.0], &ArcDecayOptions::default()).unwrap();
        for side in [&rep.right, &rep.left] {
            assert!(side.windows(2).all(|w| w[1] < w[0]), "y={y}: {rep:?}");
        }
    }
}

#[test]
fn arc_decay_wide_ladder() {
    let p = common::model();
    let c = make_contour(ContourKind::Flat, 3.0).unwrap();
    let rep = verify_arc_decay(&p, &c, 0.5, 0.5, &[10.0, 50.0, 100.0], &ArcDecayOptions::default()).unwrap();
    assert!(rep.verified());
    assert!(rep.right_guaranteed && rep.left_guaranteed);
}

#[test]
fn arc_decay_outside_guaranteed_range_is_reported() {
    let p = KoBoLParams { nu: 0.75, mu: 0.0, ..common::model() };
    let c = make_contour(ContourKind::Flat, 3.0).unwrap();
    let rep = verify_arc_decay(&p, &c, 0.5, 0.5, &[10.0, 20.0, 40.0, 80.0], &ArcDecayOptions::default()).unwrap();
    assert!(rep.right_verified && rep.right_guaranteed);
    assert!(!rep.left_guaranteed);
    assert_eq!(rep.left.len(), 4);
}

#[test]
fn arc_radii_must_ascend() {
    let p = common::model();
    let c = make_contour(ContourKind::Flat, 3.0).unwrap();
    assert!(verify_arc_decay(&p, &c, 0.5, 0.5, &[20.0, 10.0], &ArcDecayOptions::default()).is_err());
    assert!(verify_arc_decay(&p, &c, 0.5, 0.0, &[10.0], &ArcDecayOptions::default()).is_err());
}
