//! European call prices: nested quadrature over the reference density, the
//! closed-form node series `I1 + I2` for any contour, and Black–Scholes.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods once std is linked
use num_traits::Float;

use crate::budget::SamplingPlan;
use crate::charexp::{CharacteristicExponent, Reflected};
use crate::contour::{ContourKind, ContourSpec};
use crate::density::{check_growth, check_plan, damped_density, node_sum, upper_nodes};
use crate::error::{Error, Result};
use crate::math::norm_cdf;
use crate::quad::{integrate_complex, QuadOptions};

/// Spot, strike, continuously compounded rate and maturity of a call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketSpec {
    pub s0: f64,
    pub k: f64,
    pub r: f64,
    pub t: f64,
}

impl MarketSpec {
    pub fn new(s0: f64, k: f64, r: f64, t: f64) -> Result<Self> {
        let m = Self { s0, k, r, t };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s0 > 0.0 && self.s0.is_finite()) {
            return Err(Error::Domain("spot must be positive"));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::Domain("strike must be positive"));
        }
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(Error::Domain("rate must be nonnegative"));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::Domain("maturity must be positive"));
        }
        Ok(())
    }

    /// `ln(K/S0)`.
    pub fn log_moneyness(&self) -> f64 {
        (self.k / self.s0).ln()
    }

    pub fn discount(&self) -> f64 {
        (-self.r * self.t).exp()
    }

    pub fn with_strike(mut self, k: f64) -> Self {
        self.k = k;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PriceMethod {
    Quadrature,
    Series(ContourKind),
}

impl PriceMethod {
    pub fn name(self) -> &'static str {
        match self {
            PriceMethod::Quadrature => "quadrature",
            PriceMethod::Series(ContourKind::Flat) => "series-flat",
            PriceMethod::Series(ContourKind::Parabola) => "series-parabola",
            PriceMethod::Series(ContourKind::Cosh) => "series-cosh",
            PriceMethod::Series(ContourKind::Custom) => "series-custom",
        }
    }
}

/// A call price with its two partial sums.
///
/// `i1` is the spot leg and `i2` the strike leg; `price = Re(i1 + i2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceResult {
    pub price: f64,
    pub i1: Complex64,
    pub i2: Complex64,
    pub residue: f64,
    pub plan: Option<SamplingPlan>,
    pub method: PriceMethod,
    /// Error estimate (quadrature) or the sum of term magnitudes (series).
    pub error: f64,
}

fn check_damping<E: CharacteristicExponent>(psi: &E, alpha_plus: f64) -> Result<()> {
    let strip = Reflected(psi).strip();
    if !(alpha_plus > 1.0) {
        return Err(Error::StripViolation {
            im: alpha_plus,
            lower: 1.0,
            upper: strip.upper,
        });
    }
    strip.require_interior(alpha_plus)
}

/// `e^{-rT}∫_{ln(K/S0)}^{ŷ} p_T(y)(S0e^y − K) dy` with `p_T` from the damped quadrature.
///
/// The limits are clipped with Chernoff bounds `E[e^{sX}]e^{(1-s)y}` so each
/// neglected piece stays below `tol/100`. Densities at `y < 0` use the
/// mirrored damping `-α₊` (same value, no cancellation).
pub fn price_quadrature<E: CharacteristicExponent>(
    psi: &E,
    market: &MarketSpec,
    alpha_plus: f64,
    a: f64,
    tol: f64,
) -> Result<PriceResult> {
    market.validate()?;
    check_damping(psi, alpha_plus)?;
    if !(a > 0.0 && tol > 0.0) {
        return Err(Error::Domain("A and tol must be positive"));
    }
    let strip = psi.strip();
    let disc = market.discount();
    let (s0, k, t) = (market.s0, market.k, market.t);
    let moment = |s: f64| -> Result<f64> { Ok((-psi.psi(Complex64::new(0.0, -s))? * t).exp().re) };

    let s_up = (1.0 + 0.5 * (-strip.lower - 1.0)).min(4.0);
    let beta = (0.5 * strip.upper).min(4.0);
    let slack = 1e-2 * tol;
    let y_hi = ((disc * s0 * moment(s_up)? / slack).ln() / (s_up - 1.0)).max(0.0);
    let y_lo = (slack / (disc * s0 * moment(-beta)?)).ln() / (1.0 + beta);
    let lower = market.log_moneyness().max(y_lo);
    let tail = slack * 2.0;
    if lower >= y_hi {
        return Ok(PriceResult {
            price: 0.0,
            i1: Complex64::default(),
            i2: Complex64::default(),
            residue: 0.0,
            plan: None,
            method: PriceMethod::Quadrature,
            error: tail,
        });
    }

    let inv_lower = Reflected(psi).strip().lower;
    let alpha_neg = (-alpha_plus).max(0.75 * inv_lower);
    let inner = 0.1 * tol / (disc * (y_hi - lower));
    let mut failure = None;
    let integrand = |y: f64| {
        let alpha = if y >= 0.0 { alpha_plus } else { alpha_neg };
        let ey = y.exp();
        match damped_density(psi, t, y, alpha, a, inner / (s0 * ey + k)) {
            Ok((p, _)) => Complex64::new(s0 * ey * p, -k * p),
            Err(e) => {
                failure.get_or_insert(e);
                Complex64::default()
            }
        }
    };
    let opts = QuadOptions::abs(0.5 * tol / disc);
    let est = if lower < 0.0 && y_hi > 0.0 {
        let mut f = integrand;
        let left = integrate_complex(&mut f, lower, 0.0, 2, &opts);
        let right = integrate_complex(&mut f, 0.0, y_hi, 4, &opts);
        (left, right)
    } else {
        let mut f = integrand;
        let one = integrate_complex(&mut f, lower, y_hi, 4, &opts);
        let zero = integrate_complex(|_| Complex64::default(), 0.0, 0.0, 1, &opts);
        (one, zero)
    };
    if let Some(e) = failure {
        return Err(e);
    }
    let error = (est.0.error + est.1.error) * disc + tail;
    let total = est.0.into_result()? + est.1.into_result()?;
    let i1 = Complex64::new(disc * total.re, 0.0);
    let i2 = Complex64::new(disc * total.im, 0.0);
    Ok(PriceResult {
        price: i1.re + i2.re,
        i1,
        i2,
        residue: 0.0,
        plan: None,
        method: PriceMethod::Quadrature,
        error,
    })
}

// (e^{σz} − e^{κz})/z scaled by e^{lw}, with the z → 0 limit e^{lw}(σ − κ).
fn leg(lw: Complex64, z: Complex64, sigma: f64, kappa: f64) -> Complex64 {
    if z.norm() < 1e-12 {
        return lw.exp() * (sigma - kappa);
    }
    ((lw + z * sigma).exp() - (lw + z * kappa).exp()) / z
}

/// `I1 + I2` over the nodes `θ_k = πk/σ` of `plan`, with `c = -α₊ - a₊(θ_k) + if(θ_k)`:
/// `I1 = e^{-rT}S0/(2σ) Σ w_k (e^{σ(1+c)} − (K/S0)^{1+c})/(1+c)`,
/// `I2 = −e^{-rT}K/(2σ) Σ w_k (e^{σc} − (K/S0)^c)/c`,
/// `w_k = e^{-Tψ(-λ₊(θ_k))} λ₊'(θ_k)`. Only the upper contour is used.
pub fn price_series<E: CharacteristicExponent>(
    psi: &E,
    spec: &ContourSpec,
    market: &MarketSpec,
    plan: &SamplingPlan,
) -> Result<PriceResult> {
    market.validate()?;
    check_plan(spec, plan)?;
    let kappa = market.log_moneyness();
    let sigma = plan.sigma;
    if !(kappa.abs() < sigma) {
        return Err(Error::Domain("ln(K/S0) must lie inside (-sigma, sigma)"));
    }
    let nodes = upper_nodes(psi, spec, market.t, plan)?;
    let i = Complex64::i();
    let (s1, m1) = node_sum(&nodes, plan, |p, lw| leg(lw, i * p + 1.0, sigma, kappa))?;
    let (s2, m2) = node_sum(&nodes, plan, |p, lw| leg(lw, i * p, sigma, kappa))?;
    let scale = market.discount() / (2.0 * sigma);
    let i1 = s1 * (scale * market.s0);
    let i2 = -s2 * (scale * market.k);
    let total = i1 + i2;
    let price = total.re;
    let magnitude = scale * (market.s0 * m1 + market.k * m2);
    // a call is worth at most S0, so that is the largest legitimate scale
    check_growth(magnitude, price.abs().min(market.s0))?;
    let residue = total.im.abs();
    let limit = 1e-9 * price.abs().max(1.0);
    if residue > limit {
        return Err(Error::Residue { residue, limit });
    }
    Ok(PriceResult {
        price,
        i1,
        i2,
        residue,
        plan: Some(*plan),
        method: PriceMethod::Series(spec.kind),
        error: magnitude,
    })
}

/// Black–Scholes call `S0Φ(d1) − Ke^{-rT}Φ(d2)`.
pub fn black_scholes_reference(market: &MarketSpec, vol: f64) -> f64 {
    let sd = vol * market.t.sqrt();
    let d1 = ((market.s0 / market.k).ln() + (market.r + 0.5 * vol * vol) * market.t) / sd;
    let d2 = d1 - sd;
    market.s0 * norm_cdf(d1) - market.k * market.discount() * norm_cdf(d2)
}

/// `S0·vol·√(T/2π)`, the at-the-money small-maturity limit.
pub fn atm_short_maturity(s0: f64, vol: f64, t: f64) -> f64 {
    s0 * vol * (t / (2.0 * PI)).sqrt()
}
