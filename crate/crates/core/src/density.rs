//! Transition densities `p_τ(y)` by damped quadrature (the reference path),
//! by a deformed-contour integral, and by the sampled cardinal-series approximant.
//!
//! All three invert `p_τ(y) = (1/2π)∫ e^{iyη} e^{-τψ(-η)} dη` along lines or
//! contours in the upper half of the `η`-plane.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods once std is linked
use num_traits::Float;

use crate::budget::{tail_eps, SamplingPlan};
use crate::charexp::{CharacteristicExponent, Reflected};
use crate::contour::{eval_contour, ContourSpec};
use crate::error::{Error, Result};
use crate::quad::{integrate_complex, QuadOptions};
use crate::sum::ComplexSum;

/// How a density value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DensityMethod {
    Quadrature,
    Contour,
    Approximant,
}

impl DensityMethod {
    pub fn name(self) -> &'static str {
        match self {
            DensityMethod::Quadrature => "quadrature",
            DensityMethod::Contour => "contour",
            DensityMethod::Approximant => "approximant",
        }
    }
}

/// A density value with its quadrature error estimate and truncation tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEstimate {
    pub value: f64,
    pub error: f64,
    pub tail: f64,
}

/// Density values on a grid of log-prices.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    pub method: DensityMethod,
    pub y: Vec<f64>,
    pub p: Vec<f64>,
    pub err: Vec<f64>,
}

impl DensityCurve {
    pub fn new(method: DensityMethod) -> Self {
        Self {
            method,
            y: Vec::new(),
            p: Vec::new(),
            err: Vec::new(),
        }
    }

    pub fn push(&mut self, y: f64, p: f64, err: f64) {
        self.y.push(y);
        self.p.push(p);
        self.err.push(err);
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Points where the density dips below `-1e-8`.
    pub fn negative_points(&self) -> Vec<f64> {
        self.y.iter().zip(&self.p).filter(|(_, p)| **p < -1e-8).map(|(y, _)| *y).collect()
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain("tau must be positive and finite"))
    }
}

/// `(1/π) e^{-αy} Re∫_0^A e^{iyv} e^{-τψ(-(v+iα))} dv` and its error estimate.
///
/// Uses the conjugate symmetry of the integrand to fold `[-A, A]` onto `[0, A]`.
pub(crate) fn damped_density<E: CharacteristicExponent>(
    psi: &E,
    tau: f64,
    y: f64,
    alpha: f64,
    a: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let inv = Reflected(psi);
    inv.strip().require_interior(alpha)?;
    let scale = (alpha * y).exp() * PI;
    let panels = ((a * y.abs()) / (2.0 * PI)).ceil().min(4096.0) as usize + 2;
    let mut failure = None;
    let integrand = |v: f64| match inv.psi(Complex64::new(v, alpha)) {
        Ok(p) => (Complex64::new(0.0, y * v) - p * tau).exp(),
        Err(e) => {
            failure.get_or_insert(e);
            Complex64::default()
        }
    };
    let est = integrate_complex(integrand, 0.0, a, panels, &QuadOptions::abs(tol * scale));
    if let Some(e) = failure {
        return Err(e);
    }
    let error = est.error / scale;
    let value = est.into_result()?.re / scale;
    Ok((value, error))
}

/// Reference density by damped Fourier quadrature over `[-A, A]` on the line `Im = α₊`.
///
/// `tail` bounds the neglected `|v| > A` part.
pub fn density_quadrature<E: CharacteristicExponent>(
    psi: &E,
    tau: f64,
    y: f64,
    alpha_plus: f64,
    a: f64,
    tol: f64,
) -> Result<DensityEstimate> {
    check_tau(tau)?;
    if !(a > 0.0 && tol > 0.0) {
        return Err(Error::Domain("A and tol must be positive"));
    }
    let (value, error) = damped_density(psi, tau, y, alpha_plus, a, tol)?;
    let tail = 2.0 * (-alpha_plus * y).exp() * tail_eps(&Reflected(psi), tau, a, alpha_plus)?;
    Ok(DensityEstimate { value, error, tail })
}

/// `ln` of the node weight `e^{-τψ(-λ)}λ'` for a contour point `λ` and velocity `λ'`.
///
/// `None` when the contour point has left the `f64` range.
pub(crate) fn log_weight<E: CharacteristicExponent>(
    inv: &E,
    tau: f64,
    lambda: Complex64,
    velocity: Complex64,
) -> Result<Option<Complex64>> {
    let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
    if !finite(lambda) || !finite(velocity) {
        return Ok(None);
    }
    let p = inv.psi(lambda)?;
    if !finite(p) {
        return Ok(None);
    }
    Ok(Some(velocity.ln() - p * tau))
}

fn finite_extent(spec: &ContourSpec, a: f64, upward: bool) -> f64 {
    let finite = |t: f64| {
        let (p, v) = eval_contour(spec, t);
        p.re.is_finite() && p.im.is_finite() && v.re.is_finite() && v.im.is_finite()
    };
    let sign = if upward { 1.0 } else { -1.0 };
    if finite(sign * a) {
        return a;
    }
    let (mut lo, mut hi) = (0.0, a);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if finite(sign * mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Density through the upper contour (one-sided), or through both contours
/// when the contour carries a lower one, integrating over `θ ∈ [-A, A]`.
pub fn density_contour<E: CharacteristicExponent>(
    psi: &E,
    spec: &ContourSpec,
    tau: f64,
    y: f64,
    a: f64,
    tol: f64,
) -> Result<DensityEstimate> {
    check_tau(tau)?;
    if !(a > 0.0 && tol > 0.0) {
        return Err(Error::Domain("A and tol must be positive"));
    }
    let inv = Reflected(psi);
    let iy = Complex64::new(0.0, y);

    // Beyond the range where the path is representable the integrand must have vanished.
    let hi = finite_extent(spec, a, true);
    let lo = -finite_extent(spec, a, false);
    let edge_term = |t: f64| -> Result<f64> {
        let (p, v) = eval_contour(spec, t);
        Ok(match log_weight(&inv, tau, p, v)? {
            Some(lw) => (iy * p + lw).exp().norm(),
            None => f64::INFINITY,
        })
    };
    for t in [lo, hi] {
        if t.abs() < a && edge_term(t)? > 1e-3 * tol {
            return Err(Error::ContourOverflow { theta: t });
        }
    }

    let mut failure = None;
    let mut upper = |t: f64| {
        let (p, v) = eval_contour(spec, t);
        match log_weight(&inv, tau, p, v) {
            Ok(Some(lw)) => (iy * p + lw).exp(),
            Ok(None) => Complex64::default(),
            Err(e) => {
                failure.get_or_insert(e);
                Complex64::default()
            }
        }
    };
    let panels = ((hi - lo) * (y.abs() + 1.0) / (2.0 * PI)).ceil().min(4096.0) as usize + 2;
    let opts = QuadOptions::abs(tol * PI);

    let (value, error) = match spec.lower() {
        None => {
            let est = integrate_complex(upper, lo, hi, panels, &opts);
            if let Some(e) = failure {
                return Err(e);
            }
            let error = est.error / (2.0 * PI);
            (est.into_result()?.re / (2.0 * PI), error)
        }
        Some(lower) => {
            // weights e^{α±y}/(e^{α₊y} + e^{α₋y})
            let (ap, am) = (spec.alpha_plus * y, lower.alpha_minus * y);
            let top = ap.max(am);
            let (wp, wm) = ((ap - top).exp(), (am - top).exp());
            let (wp, wm) = (wp / (wp + wm), wm / (wp + wm));
            let mut lower_failure = None;
            let both = |t: f64| {
                let mut acc = upper(t) * wp;
                if let Some((p, v)) = spec.eval_lower(t) {
                    match log_weight(&inv, tau, p, v) {
                        Ok(Some(lw)) => acc += (iy * p + lw).exp() * wm,
                        Ok(None) => {}
                        Err(e) => {
                            lower_failure.get_or_insert(e);
                        }
                    }
                }
                acc
            };
            let est = integrate_complex(both, lo, hi, panels, &opts);
            if let Some(e) = lower_failure {
                return Err(e);
            }
            if let Some(e) = failure {
                return Err(e);
            }
            let error = est.error / (2.0 * PI);
            (est.into_result()?.re / (2.0 * PI), error)
        }
    };
    Ok(DensityEstimate {
        value,
        error,
        tail: f64::NAN,
    })
}

/// Node data `(λ_k, ln(e^{-τψ(-λ_k)}λ'_k))` for `k = -N..=N`; `None` once the path overflows.
pub(crate) type Node = Option<(Complex64, Complex64)>;

pub(crate) fn upper_nodes<E: CharacteristicExponent>(
    psi: &E,
    spec: &ContourSpec,
    tau: f64,
    plan: &SamplingPlan,
) -> Result<Vec<Node>> {
    let inv = Reflected(psi);
    let n = plan.n as i64;
    (-n..=n)
        .map(|k| {
            let (p, v) = eval_contour(spec, plan.node(k));
            Ok(log_weight(&inv, tau, p, v)?.map(|lw| (p, lw)))
        })
        .collect()
}

pub(crate) fn lower_nodes<E: CharacteristicExponent>(
    psi: &E,
    spec: &ContourSpec,
    tau: f64,
    plan: &SamplingPlan,
) -> Result<Vec<Node>> {
    let inv = Reflected(psi);
    let n = plan.n as i64;
    (-n..=n)
        .map(|k| match spec.eval_lower(plan.node(k)) {
            Some((p, v)) => Ok(log_weight(&inv, tau, p, v)?.map(|lw| (p, lw))),
            None => Ok(None),
        })
        .collect()
}

/// Sum of `term(λ_k, w_k)` in index order, plus the sum of magnitudes.
///
/// Where the path has overflowed on one side, the series is cut there if the
/// last representable term is negligible; otherwise this is an overflow error.
pub(crate) fn node_sum<F>(nodes: &[Node], plan: &SamplingPlan, mut term: F) -> Result<(Complex64, f64)>
where
    F: FnMut(Complex64, Complex64) -> Complex64,
{
    let n = plan.n;
    let mut values: Vec<Option<Complex64>> = Vec::with_capacity(nodes.len());
    for node in nodes {
        values.push(node.map(|(p, lw)| term(p, lw)));
    }
    let mut magnitude = 0.0;
    for v in values.iter().flatten() {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::SeriesDiverged {
                magnitude: f64::INFINITY,
                result: f64::NAN,
            });
        }
        magnitude += v.norm();
    }

    let right_cut = (n..values.len()).find(|&i| values[i].is_none()).unwrap_or(values.len());
    let left_cut = (0..=n).rev().find(|&i| values[i].is_none());
    let negligible = |idx: Option<usize>| idx.and_then(|i| values[i]).is_none_or(|v| v.norm() <= 1e-15 * magnitude);
    if right_cut < values.len() && !negligible(right_cut.checked_sub(1).filter(|&i| i >= n)) {
        return Err(Error::ContourOverflow {
            theta: plan.node(right_cut as i64 - n as i64),
        });
    }
    if let Some(l) = left_cut {
        if !negligible(Some(l + 1).filter(|&i| i <= n)) {
            return Err(Error::ContourOverflow {
                theta: plan.node(l as i64 - n as i64),
            });
        }
    }
    let start = left_cut.map_or(0, |l| l + 1);
    let mut acc = ComplexSum::new();
    let mut included = 0.0;
    for v in values[start..right_cut].iter().flatten() {
        acc.add(*v);
        included += v.norm();
    }
    Ok((acc.value(), included))
}

pub(crate) fn check_growth(magnitude: f64, result: f64) -> Result<()> {
    if magnitude > 1e10 * result.abs().max(1.0) || !magnitude.is_finite() {
        Err(Error::SeriesDiverged { magnitude, result })
    } else {
        Ok(())
    }
}

pub(crate) fn check_plan(spec: &ContourSpec, plan: &SamplingPlan) -> Result<()> {
    plan.validate()?;
    if plan.alpha_plus != spec.alpha_plus {
        return Err(Error::PlanInconsistent("plan and contour use different alpha_plus"));
    }
    Ok(())
}

/// Sampled approximant `p*_τ(y) = (1/2σ) Re Σ_{|k|≤N} e^{iyλ₊(θ_k)} e^{-τψ(-λ₊(θ_k))} λ₊'(θ_k)`
/// on the nodes `θ_k = πk/σ`, and zero for `|y| > σ`. With a lower contour the
/// two representations are averaged with weights `e^{α±y}`.
pub fn density_approximant<E: CharacteristicExponent>(
    psi: &E,
    spec: &ContourSpec,
    tau: f64,
    y: f64,
    plan: &SamplingPlan,
) -> Result<f64> {
    check_tau(tau)?;
    check_plan(spec, plan)?;
    if y.abs() > plan.sigma {
        return Ok(0.0);
    }
    let iy = Complex64::new(0.0, y);
    let prefactor = 1.0 / (2.0 * plan.sigma);
    let upper = upper_nodes(psi, spec, tau, plan)?;
    let (mut sum, mut magnitude) = node_sum(&upper, plan, |p, lw| (iy * p + lw).exp())?;
    if let Some(lower) = spec.lower() {
        let (ap, am) = (spec.alpha_plus * y, lower.alpha_minus * y);
        let top = ap.max(am);
        let (wp, wm) = ((ap - top).exp(), (am - top).exp());
        let (wp, wm) = (wp / (wp + wm), wm / (wp + wm));
        let nodes = lower_nodes(psi, spec, tau, plan)?;
        let (ls, lm) = node_sum(&nodes, plan, |p, lw| (iy * p + lw).exp())?;
        sum = sum * wp + ls * wm;
        magnitude = magnitude * wp + lm * wm;
    }
    let value = sum.re * prefactor;
    check_growth(magnitude * prefactor, value)?;
    let residue = (sum.im * prefactor).abs();
    let limit = 1e-9 * value.abs().max(1.0);
    if residue > limit {
        return Err(Error::Residue { residue, limit });
    }
    Ok(value)
}
