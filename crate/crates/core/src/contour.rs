//! Deformation contours `λ₊(θ) = f(θ) + i(α₊ + a₊(θ))` (and an optional lower
//! contour `λ₋(θ) = g(θ) + i(α₋ + a₋(θ))`), plus a numerical check that the
//! closing arcs of the deformation vanish.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods once std is linked
use num_traits::Float;

use crate::charexp::CharacteristicExponent;
use crate::error::{Error, Result};
use crate::quad::{integrate_complex, QuadOptions};

/// Built-in contour families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContourKind {
    /// `f(θ) = θ`, `a₊ ≡ 0`.
    Flat,
    /// `f(θ) = θ`, `a₊(θ) = θ²`.
    Parabola,
    /// `f(θ) = θ`, `a₊(θ) = cosh(θ²)`.
    Cosh,
    Custom,
}

impl ContourKind {
    pub fn name(self) -> &'static str {
        match self {
            ContourKind::Flat => "flat",
            ContourKind::Parabola => "parabola",
            ContourKind::Cosh => "cosh",
            ContourKind::Custom => "custom",
        }
    }
}

/// Real shape `f` and bump `a` of a contour, with derivatives.
pub trait ContourShape: Send + Sync {
    fn f(&self, theta: f64) -> f64;
    fn df(&self, theta: f64) -> f64;
    fn bump(&self, theta: f64) -> f64;
    fn dbump(&self, theta: f64) -> f64;
}

#[derive(Debug, Clone, Copy)]
struct Builtin(ContourKind);

impl ContourShape for Builtin {
    fn f(&self, theta: f64) -> f64 {
        theta
    }

    fn df(&self, _theta: f64) -> f64 {
        1.0
    }

    fn bump(&self, theta: f64) -> f64 {
        match self.0 {
            ContourKind::Parabola => theta * theta,
            ContourKind::Cosh => (theta * theta).cosh(),
            _ => 0.0,
        }
    }

    fn dbump(&self, theta: f64) -> f64 {
        match self.0 {
            ContourKind::Parabola => 2.0 * theta,
            ContourKind::Cosh => 2.0 * theta * (theta * theta).sinh(),
            _ => 0.0,
        }
    }
}

const CHECK_RANGE: f64 = 50.0;
const CHECK_POINTS: usize = 1001;

// Sign of f, sign of the bump, and monotonicity of the bump away from 0.
fn check_shape(shape: &dyn ContourShape, upper: bool) -> Result<()> {
    let step = 2.0 * CHECK_RANGE / (CHECK_POINTS - 1) as f64;
    let sign = if upper { 1.0 } else { -1.0 };
    let mut prev: Option<(f64, f64)> = None;
    for j in 0..CHECK_POINTS {
        let theta = -CHECK_RANGE + step * j as f64;
        let f = shape.f(theta);
        let a = sign * shape.bump(theta);
        if f.is_nan() || a.is_nan() || shape.df(theta).is_nan() || shape.dbump(theta).is_nan() {
            return Err(Error::ContourInvariant { theta, what: "shape evaluates to NaN" });
        }
        if (theta < 0.0 && f > 0.0) || (theta > 0.0 && f < 0.0) {
            return Err(Error::ContourInvariant {
                theta,
                what: "real part must share the sign of theta",
            });
        }
        if a < 0.0 {
            return Err(Error::ContourInvariant {
                theta,
                what: if upper { "bump a+ must be nonnegative" } else { "bump a- must be nonpositive" },
            });
        }
        if let Some((pt, pa)) = prev {
            let slack = 1e-12 * a.abs().max(pa.abs()).max(1.0);
            let ok = if theta <= 0.0 { a <= pa + slack } else if pt >= 0.0 { a + slack >= pa } else { true };
            if !ok {
                return Err(Error::ContourInvariant {
                    theta,
                    what: "bump must shrink towards theta = 0 and grow away from it",
                });
            }
        }
        prev = Some((theta, a));
    }
    Ok(())
}

/// The lower contour `g(θ) + i(α₋ + a₋(θ))`.
#[derive(Clone)]
pub struct LowerContour {
    pub alpha_minus: f64,
    shape: Arc<dyn ContourShape>,
}

impl fmt::Debug for LowerContour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LowerContour").field("alpha_minus", &self.alpha_minus).finish_non_exhaustive()
    }
}

/// An upper deformation contour, optionally paired with a lower one.
#[derive(Clone)]
pub struct ContourSpec {
    pub kind: ContourKind,
    pub alpha_plus: f64,
    shape: Arc<dyn ContourShape>,
    lower: Option<LowerContour>,
}

impl fmt::Debug for ContourSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContourSpec")
            .field("kind", &self.kind)
            .field("alpha_plus", &self.alpha_plus)
            .field("lower", &self.lower)
            .finish_non_exhaustive()
    }
}

fn check_alpha_plus(alpha_plus: f64) -> Result<()> {
    if alpha_plus > 1.0 && alpha_plus.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain("damping alpha_plus must exceed 1"))
    }
}

/// Builds a flat, parabola or cosh contour with offset `alpha_plus > 1`.
pub fn make_contour(kind: ContourKind, alpha_plus: f64) -> Result<ContourSpec> {
    check_alpha_plus(alpha_plus)?;
    if kind == ContourKind::Custom {
        return Err(Error::Domain("custom contours are built with ContourSpec::custom"));
    }
    Ok(ContourSpec {
        kind,
        alpha_plus,
        shape: Arc::new(Builtin(kind)),
        lower: None,
    })
}

impl ContourSpec {
    /// A user contour; its shape is checked on a 1001-point grid over `[-50, 50]`.
    pub fn custom<S: ContourShape + 'static>(alpha_plus: f64, shape: S) -> Result<Self> {
        check_alpha_plus(alpha_plus)?;
        check_shape(&shape, true)?;
        Ok(Self {
            kind: ContourKind::Custom,
            alpha_plus,
            shape: Arc::new(shape),
            lower: None,
        })
    }

    /// Adds the lower contour `g(θ) + i(α₋ + a₋(θ))` with `α₋ < 0`, `a₋ ≤ 0`.
    pub fn with_lower<S: ContourShape + 'static>(mut self, alpha_minus: f64, shape: S) -> Result<Self> {
        if !(alpha_minus < 0.0 && alpha_minus.is_finite()) {
            return Err(Error::Domain("alpha_minus must be negative"));
        }
        check_shape(&shape, false)?;
        self.lower = Some(LowerContour {
            alpha_minus,
            shape: Arc::new(shape),
        });
        Ok(self)
    }

    /// Mirror image of a built-in family as the lower contour: `g = f`, `a₋ = -a₊`.
    pub fn with_mirrored_lower(self, alpha_minus: f64) -> Result<Self> {
        let kind = match self.kind {
            ContourKind::Custom => return Err(Error::Domain("mirrored lower contour needs a built-in family")),
            k => k,
        };
        self.with_lower(alpha_minus, Mirror(Builtin(kind)))
    }

    pub fn lower(&self) -> Option<&LowerContour> {
        self.lower.as_ref()
    }

    pub fn f(&self, theta: f64) -> f64 {
        self.shape.f(theta)
    }

    pub fn a_plus(&self, theta: f64) -> f64 {
        self.shape.bump(theta)
    }

    /// `(λ₊(θ), λ₊'(θ))`.
    pub fn eval(&self, theta: f64) -> (Complex64, Complex64) {
        eval_contour(self, theta)
    }

    /// `(λ₋(θ), λ₋'(θ))` when a lower contour is present.
    pub fn eval_lower(&self, theta: f64) -> Option<(Complex64, Complex64)> {
        self.lower.as_ref().map(|l| {
            let s = &l.shape;
            (
                Complex64::new(s.f(theta), l.alpha_minus + s.bump(theta)),
                Complex64::new(s.df(theta), s.dbump(theta)),
            )
        })
    }
}

struct Mirror<S>(S);

impl<S: ContourShape> ContourShape for Mirror<S> {
    fn f(&self, theta: f64) -> f64 {
        self.0.f(theta)
    }

    fn df(&self, theta: f64) -> f64 {
        self.0.df(theta)
    }

    fn bump(&self, theta: f64) -> f64 {
        -self.0.bump(theta)
    }

    fn dbump(&self, theta: f64) -> f64 {
        -self.0.dbump(theta)
    }
}

/// `(λ₊(θ), λ₊'(θ)) = (f + i(α₊ + a₊), f' + i a₊')`.
pub fn eval_contour(spec: &ContourSpec, theta: f64) -> (Complex64, Complex64) {
    let s = &spec.shape;
    (
        Complex64::new(s.f(theta), spec.alpha_plus + s.bump(theta)),
        Complex64::new(s.df(theta), s.dbump(theta)),
    )
}

/// One piece of the closing path: a circular arc or a real segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArcPiece {
    Circle { radius: f64, from: f64, to: f64 },
    Segment { from: f64, to: f64 },
}

/// The arcs `γ₁..γ₆` that close the contours at parameter `R`.
///
/// With only the upper contour, `γ₁` (right) and `γ₄` (left) join its
/// endpoints to the real axis and the rest are absent.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcFamily {
    pub r: f64,
    pub rho_plus: f64,
    pub rho_minus: Option<f64>,
    pub arcs: [Option<ArcPiece>; 6],
    pub closed: bool,
}

impl ArcFamily {
    pub fn new(spec: &ContourSpec, r: f64) -> Self {
        let (end_r, _) = eval_contour(spec, r);
        let (end_l, _) = eval_contour(spec, -r);
        let rho_plus = end_r.norm();
        let mut arcs = [None; 6];
        arcs[0] = Some(ArcPiece::Circle {
            radius: rho_plus,
            from: end_r.arg(),
            to: 0.0,
        });
        arcs[3] = Some(ArcPiece::Circle {
            radius: end_l.norm(),
            from: end_l.arg(),
            to: PI,
        });
        let rho_minus = spec.eval_lower(r).map(|(lr, _)| {
            let (ll, _) = spec.eval_lower(-r).unwrap_or((lr, lr));
            let rho_minus = lr.norm();
            arcs[1] = Some(ArcPiece::Segment {
                from: rho_plus,
                to: rho_minus,
            });
            arcs[2] = Some(ArcPiece::Circle {
                radius: rho_minus,
                from: 0.0,
                to: lr.arg(),
            });
            arcs[4] = Some(ArcPiece::Segment {
                from: -end_l.norm(),
                to: -ll.norm(),
            });
            // arg in (-π, -π/2) for the lower-left endpoint, measured from π
            let to = if ll.arg() < 0.0 { ll.arg() + 2.0 * PI } else { ll.arg() };
            arcs[5] = Some(ArcPiece::Circle {
                radius: ll.norm(),
                from: PI,
                to,
            });
            rho_minus
        });
        Self {
            r,
            rho_plus,
            rho_minus,
            arcs,
            closed: rho_minus.is_some(),
        }
    }
}

/// Settings for [`verify_arc_decay`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcDecayOptions {
    /// Final arc magnitude below which decay counts as verified.
    pub threshold: f64,
    pub tol: f64,
}

impl Default for ArcDecayOptions {
    fn default() -> Self {
        Self {
            threshold: 1e-3,
            tol: 1e-14,
        }
    }
}

/// Arc integral magnitudes per radius, and verdicts.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub radii: Vec<f64>,
    /// `|∫ e^{iyz - τψ(z)} dz|` over the right arc `γ₁`.
    pub right: Vec<f64>,
    /// Same over the left arc `γ₄`.
    pub left: Vec<f64>,
    pub right_verified: bool,
    pub left_verified: bool,
    /// Whether decay on each side is known analytically for this exponent and `y`.
    pub right_guaranteed: bool,
    pub left_guaranteed: bool,
    pub threshold: f64,
}

impl DecayReport {
    pub fn verified(&self) -> bool {
        self.right_verified && self.left_verified
    }
}

fn arc_integral<E: CharacteristicExponent>(
    psi: &E,
    y: f64,
    tau: f64,
    radius: f64,
    from: f64,
    to: f64,
    tol: f64,
) -> Result<f64> {
    if radius == 0.0 || from == to {
        return Ok(0.0);
    }
    let mut failure = None;
    let integrand = |phi: f64| {
        let e = Complex64::from_polar(1.0, phi);
        let z = e * radius;
        match psi.psi(z) {
            Ok(p) => (Complex64::i() * y * z - p * tau).exp() * (Complex64::i() * z),
            Err(err) => {
                failure.get_or_insert(err);
                Complex64::default()
            }
        }
    };
    let est = integrate_complex(integrand, from, to, 8, &QuadOptions::abs(tol).with_rel(1e-10));
    if let Some(err) = failure {
        return Err(err);
    }
    Ok(est.into_result()?.norm())
}

fn decreasing_to(values: &[f64], threshold: f64) -> bool {
    let monotone = values.windows(2).all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0));
    monotone && values.last().is_some_and(|v| *v < threshold)
}

/// Integrates `e^{iyz - τψ(z)}` over the right and left closing arcs at each
/// radius and checks that the magnitudes strictly decrease to below the threshold.
pub fn verify_arc_decay<E: CharacteristicExponent>(
    psi: &E,
    spec: &ContourSpec,
    y: f64,
    tau: f64,
    radii: &[f64],
    opts: &ArcDecayOptions,
) -> Result<DecayReport> {
    if !(tau > 0.0) {
        return Err(Error::Domain("tau must be positive"));
    }
    if radii.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("radii must be finite, nonnegative and strictly ascending"));
    }
    let mut right = Vec::with_capacity(radii.len());
    let mut left = Vec::with_capacity(radii.len());
    for &r in radii {
        if r == 0.0 {
            right.push(0.0);
            left.push(0.0);
            continue;
        }
        let family = ArcFamily::new(spec, r);
        for (slot, out) in [(0, &mut right), (3, &mut left)] {
            let value = match family.arcs[slot] {
                Some(ArcPiece::Circle { radius, from, to }) => arc_integral(psi, y, tau, radius, from, to, opts.tol)?,
                _ => 0.0,
            };
            out.push(value);
        }
    }
    let (right_guaranteed, left_guaranteed) = psi.arc_decay_guarantee(y);
    Ok(DecayReport {
        radii: radii.to_vec(),
        right_verified: decreasing_to(&right, opts.threshold),
        left_verified: decreasing_to(&left, opts.threshold),
        right,
        left,
        right_guaranteed,
        left_guaranteed,
        threshold: opts.threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charexp::KoBoLParams;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn flat_example() {
        let c = make_contour(ContourKind::Flat, 3.0).unwrap();
        let (p, v) = eval_contour(&c, 1.0);
        assert_eq!(p, Complex64::new(1.0, 3.0));
        assert_eq!(v, Complex64::new(1.0, 0.0));
        let (p, _) = eval_contour(&c, PI);
        assert_eq!(p, Complex64::new(PI, 3.0));
    }

    #[test]
    fn parabola_examples() {
        let c = make_contour(ContourKind::Parabola, 3.0).unwrap();
        assert_eq!(eval_contour(&c, 2.0), (Complex64::new(2.0, 7.0), Complex64::new(1.0, 4.0)));
        assert_eq!(eval_contour(&c, -1.0), (Complex64::new(-1.0, 4.0), Complex64::new(1.0, -2.0)));
    }

    #[test]
    fn cosh_examples() {
        let c = make_contour(ContourKind::Cosh, 3.0).unwrap();
        assert_eq!(eval_contour(&c, 0.0).1, Complex64::new(1.0, 0.0));
        let (p, v) = eval_contour(&c, 1.0);
        assert!(close(p, Complex64::new(1.0, 3.0 + 1f64.cosh()), 1e-15));
        assert!(close(v, Complex64::new(1.0, 2.0 * 1f64.sinh()), 1e-15));
    }

    #[test]
    fn velocity_matches_finite_difference() {
        for kind in [ContourKind::Flat, ContourKind::Parabola, ContourKind::Cosh] {
            let c = make_contour(kind, 3.0).unwrap();
            for t in [-2.0, -0.5, 0.5, 2.0] {
                let h = 1e-6;
                let fd = (eval_contour(&c, t + h).0 - eval_contour(&c, t - h).0) / (2.0 * h);
                let v = eval_contour(&c, t).1;
                assert!(close(fd, v, 1e-8 * v.norm().max(1.0)), "{kind:?} {t}: {fd} vs {v}");
            }
        }
    }

    #[test]
    fn builtins_pass_invariants() {
        for kind in [ContourKind::Flat, ContourKind::Parabola, ContourKind::Cosh] {
            check_shape(&Builtin(kind), true).unwrap();
            check_shape(&Mirror(Builtin(kind)), false).unwrap();
        }
    }

    struct Bad;
    impl ContourShape for Bad {
        fn f(&self, t: f64) -> f64 {
            t
        }
        fn df(&self, _: f64) -> f64 {
            1.0
        }
        fn bump(&self, t: f64) -> f64 {
            t.sin().abs()
        }
        fn dbump(&self, t: f64) -> f64 {
            t.cos() * t.sin().signum()
        }
    }

    #[test]
    fn custom_rejects_non_monotone_bump() {
        let err = ContourSpec::custom(3.0, Bad).unwrap_err();
        assert!(matches!(err, Error::ContourInvariant { .. }));
        assert!(make_contour(ContourKind::Flat, 0.5).is_err());
    }

    #[test]
    fn empty_arc_is_zero() {
        let p = KoBoLParams::benchmark();
        let c = make_contour(ContourKind::Flat, 3.0).unwrap();
        let rep = verify_arc_decay(&p, &c, 0.5, 0.5, &[0.0], &ArcDecayOptions::default()).unwrap();
        assert_eq!(rep.right, [0.0]);
        assert_eq!(rep.left, [0.0]);
    }

    #[test]
    fn arc_family_endpoints() {
        let c = make_contour(ContourKind::Flat, 3.0).unwrap().with_mirrored_lower(-3.0).unwrap();
        let fam = ArcFamily::new(&c, 4.0);
        assert!(fam.closed);
        assert!((fam.rho_plus - 5.0).abs() < 1e-15);
        assert_eq!(fam.rho_minus, Some(5.0));
        match fam.arcs[5] {
            Some(ArcPiece::Circle { from, to, .. }) => {
                assert_eq!(from, PI);
                assert!(to > PI && to < 1.5 * PI);
            }
            other => panic!("{other:?}"),
        }
    }
}
