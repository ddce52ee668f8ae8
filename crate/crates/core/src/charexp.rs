//! Characteristic exponents: KoBoL (closed form), Gaussian, and a brute-force
//! Lévy–Khintchine quadrature used as an oracle.

use alloc::sync::Arc;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods once std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::math::{cpow, gamma};
use crate::quad::{integrate_complex, integrate_complex_tail, integrate_panels, integrate_tail, QuadOptions};

/// Horizontal strip `lower ≤ Im ξ ≤ upper` on which an exponent is analytic.
///
/// The boundary lines are admitted because the KoBoL branch points are finite
/// there (only the cuts beyond them are excluded).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strip {
    pub lower: f64,
    pub upper: f64,
}

impl Strip {
    pub const ENTIRE: Strip = Strip {
        lower: f64::NEG_INFINITY,
        upper: f64::INFINITY,
    };

    pub fn contains(&self, im: f64) -> bool {
        self.lower <= im && im <= self.upper
    }

    /// Fails with [`Error::StripViolation`] unless `im` lies strictly inside.
    pub fn require_interior(&self, im: f64) -> Result<()> {
        if self.lower < im && im < self.upper {
            Ok(())
        } else {
            Err(Error::StripViolation {
                im,
                lower: self.lower,
                upper: self.upper,
            })
        }
    }

    pub fn reflect(self) -> Strip {
        Strip {
            lower: -self.upper,
            upper: -self.lower,
        }
    }
}

/// A Lévy characteristic exponent: `E[exp(iξX_t)] = exp(-tψ(ξ))`.
pub trait CharacteristicExponent {
    fn psi(&self, xi: Complex64) -> Result<Complex64>;

    fn strip(&self) -> Strip;

    /// Whether the closing arcs of the inversion contour are known to vanish
    /// for this `y`, as `(right arc, left arc)`. Defaults to no guarantee.
    fn arc_decay_guarantee(&self, _y: f64) -> (bool, bool) {
        (false, false)
    }
}

impl<E: CharacteristicExponent + ?Sized> CharacteristicExponent for &E {
    fn psi(&self, xi: Complex64) -> Result<Complex64> {
        (**self).psi(xi)
    }

    fn strip(&self) -> Strip {
        (**self).strip()
    }

    fn arc_decay_guarantee(&self, y: f64) -> (bool, bool) {
        (**self).arc_decay_guarantee(y)
    }
}

/// `η ↦ ψ(-η)`, the exponent of `-X`.
///
/// Densities are inverted with `exp(-iyξ)`; substituting `ξ = -η` turns that
/// into an `exp(+iyη)` integral whose damping line and contours sit in the
/// upper half-plane, which is the form the contour and series code works with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflected<E>(pub E);

impl<E: CharacteristicExponent> CharacteristicExponent for Reflected<E> {
    fn psi(&self, xi: Complex64) -> Result<Complex64> {
        self.0.psi(-xi)
    }

    fn strip(&self) -> Strip {
        self.0.strip().reflect()
    }
}

/// KoBoL (tempered stable) parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KoBoLParams {
    pub nu: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub mu: f64,
}

impl KoBoLParams {
    pub fn new(nu: f64, c_plus: f64, c_minus: f64, lambda_plus: f64, lambda_minus: f64, mu: f64) -> Result<Self> {
        let p = Self {
            nu,
            c_plus,
            c_minus,
            lambda_plus,
            lambda_minus,
            mu,
        };
        p.validate()?;
        Ok(p)
    }

    /// Benchmark model: ν = 0.5, c± = 1, λ± = ±5, μ = 0.019721.
    pub fn benchmark() -> Self {
        Self {
            nu: 0.5,
            c_plus: 1.0,
            c_minus: 1.0,
            lambda_plus: 5.0,
            lambda_minus: -5.0,
            mu: 0.019721,
        }
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    /// Same parameters with the drift replaced by the risk-neutral one.
    pub fn calibrated(self, r: f64) -> Result<Self> {
        Ok(self.with_mu(calibrate_drift(&self, r)?))
    }

    pub fn validate(&self) -> Result<()> {
        check_order(self.nu)?;
        if !(self.c_plus > 0.0 && self.c_minus > 0.0) {
            return Err(Error::Domain("intensities c+ and c- must be positive"));
        }
        if !(self.lambda_plus > 1.0) {
            return Err(Error::Domain("lambda_plus must exceed 1"));
        }
        if !(self.lambda_minus < -1.0) {
            return Err(Error::Domain("lambda_minus must be below -1"));
        }
        if !self.mu.is_finite() {
            return Err(Error::Domain("drift mu must be finite"));
        }
        Ok(())
    }

    fn jump_part(&self, xi: Complex64) -> Complex64 {
        let nu = self.nu;
        let left = -self.lambda_minus;
        let i = Complex64::i();
        let pos = Complex64::from(left.powf(nu)) - cpow(Complex64::from(left) - i * xi, nu);
        let neg = Complex64::from(self.lambda_plus.powf(nu)) - cpow(Complex64::from(self.lambda_plus) + i * xi, nu);
        (pos * self.c_plus + neg * self.c_minus) * gamma(-nu)
    }
}

fn check_order(nu: f64) -> Result<()> {
    if !(nu > 0.0 && nu < 2.0) {
        return Err(Error::Domain("order nu must lie in (0, 2)"));
    }
    if nu == 1.0 {
        return Err(Error::Domain("order nu = 1 is excluded"));
    }
    Ok(())
}

/// KoBoL exponent
/// `ψ(ξ) = -iμξ + Γ(-ν)[c₊((-λ₋)^ν - (-λ₋-iξ)^ν) + c₋(λ₊^ν - (λ₊+iξ)^ν)]`, principal branch.
pub fn kobol_psi(params: &KoBoLParams, xi: Complex64) -> Result<Complex64> {
    check_order(params.nu)?;
    if !(params.lambda_minus < 0.0 && params.lambda_plus > 0.0) {
        return Err(Error::Domain("tempering must satisfy lambda_minus < 0 < lambda_plus"));
    }
    if !(xi.re.is_finite() && xi.im.is_finite()) {
        return Err(Error::Domain("xi must be finite"));
    }
    if xi.re == 0.0 && (xi.im > params.lambda_plus || xi.im < params.lambda_minus) {
        return Err(Error::BranchCut { re: xi.re, im: xi.im });
    }
    let drift = Complex64::new(0.0, -params.mu) * xi;
    Ok(drift + params.jump_part(xi))
}

impl CharacteristicExponent for KoBoLParams {
    fn psi(&self, xi: Complex64) -> Result<Complex64> {
        kobol_psi(self, xi)
    }

    fn strip(&self) -> Strip {
        Strip {
            lower: self.lambda_minus,
            upper: self.lambda_plus,
        }
    }

    fn arc_decay_guarantee(&self, y: f64) -> (bool, bool) {
        let right = self.nu < 1.0;
        let left = self.nu <= 0.5 && self.mu >= 0.0 && self.c_plus == self.c_minus && y >= 0.0;
        (right, right && left)
    }
}

/// Brownian motion with drift: `ψ(ξ) = (a/2)ξ² - ibξ`, the exponent of Normal(bt, at).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    pub a: f64,
    pub b: f64,
}

impl GaussianParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0) || !b.is_finite() || !a.is_finite() {
            return Err(Error::Domain("diffusion coefficient a must be finite and nonnegative"));
        }
        Ok(Self { a, b })
    }

    /// Risk-neutral Gaussian with volatility `vol`: `a = vol²`, `b = r - a/2`, so `ψ(-i) = -r`.
    pub fn risk_neutral(vol: f64, r: f64) -> Result<Self> {
        let a = vol * vol;
        Self::new(a, r - 0.5 * a)
    }
}

pub fn gaussian_psi(params: &GaussianParams, xi: Complex64) -> Complex64 {
    xi * xi * (0.5 * params.a) - Complex64::new(0.0, params.b) * xi
}

impl CharacteristicExponent for GaussianParams {
    fn psi(&self, xi: Complex64) -> Result<Complex64> {
        Ok(gaussian_psi(self, xi))
    }

    fn strip(&self) -> Strip {
        Strip::ENTIRE
    }

    fn arc_decay_guarantee(&self, _y: f64) -> (bool, bool) {
        (self.a > 0.0, self.a > 0.0)
    }
}

type DensityFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A Lévy density `Π(dx)/dx`, checked for `∫ min(1, x²) Π(dx) < ∞`.
#[derive(Clone)]
pub struct LevyMeasureSpec {
    density: Arc<DensityFn>,
    /// `∫ min(1, x²) Π(dx)` as computed at construction.
    pub integrability: f64,
}

impl fmt::Debug for LevyMeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LevyMeasureSpec")
            .field("integrability", &self.integrability)
            .finish_non_exhaustive()
    }
}

impl LevyMeasureSpec {
    /// Wraps `density`; the value at 0 is never used (`Π({0}) = 0`).
    pub fn new<F>(density: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let density: Arc<DensityFn> = Arc::new(density);
        let opts = QuadOptions::abs(1e-10).with_rel(1e-8);
        let d = density.clone();
        let weighted = move |x: f64| {
            if x == 0.0 {
                return 0.0;
            }
            let v = d(x);
            if v.is_nan() || v < 0.0 {
                f64::NAN
            } else {
                x.abs().min(1.0).powi(2) * v
            }
        };
        let mut total = 0.0;
        total += integrate_panels(&weighted, -1.0, 0.0, 1, &opts).into_result()?;
        total += integrate_panels(&weighted, 0.0, 1.0, 1, &opts).into_result()?;
        total += integrate_tail(&weighted, 1.0, true, &opts).into_result()?;
        total += integrate_tail(&weighted, -1.0, false, &opts).into_result()?;
        if !total.is_finite() {
            return Err(Error::Domain("Levy density is negative or not integrable against min(1, x^2)"));
        }
        Ok(Self {
            density,
            integrability: total,
        })
    }

    /// The zero measure.
    pub fn zero() -> Self {
        Self {
            density: Arc::new(|_| 0.0),
            integrability: 0.0,
        }
    }

    /// KoBoL jump density matching [`kobol_psi`]:
    /// `c₊x^{-ν-1}e^{λ₋x}` for `x > 0`, `c₋|x|^{-ν-1}e^{-λ₊|x|}` for `x < 0`.
    pub fn kobol(params: &KoBoLParams) -> Result<Self> {
        check_order(params.nu)?;
        let p = *params;
        Self::new(move |x: f64| {
            if x > 0.0 {
                p.c_plus * x.powf(-p.nu - 1.0) * (p.lambda_minus * x).exp()
            } else if x < 0.0 {
                p.c_minus * (-x).powf(-p.nu - 1.0) * (p.lambda_plus * x).exp()
            } else {
                0.0
            }
        })
    }

    pub fn density(&self, x: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else {
            (self.density)(x)
        }
    }
}

// u - sin u without cancellation for small u.
fn u_minus_sin(u: f64) -> f64 {
    if u.abs() < 0.1 {
        let u2 = u * u;
        u * u2 / 6.0 * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0 * (1.0 - u2 / 72.0)))
    } else {
        u - u.sin()
    }
}

/// `(a/2)ξ² - ibξ + ∫(1 - e^{iξx} + iξx·1{|x|<1}) Π(dx)` by adaptive quadrature on the real line.
pub fn levy_khintchine_psi_numeric(
    gauss: &GaussianParams,
    levy: &LevyMeasureSpec,
    xi: f64,
    tol: f64,
) -> Result<Complex64> {
    if !xi.is_finite() {
        return Err(Error::Domain("xi must be finite and real"));
    }
    let base = gaussian_psi(gauss, Complex64::from(xi));
    if xi == 0.0 {
        return Ok(base);
    }
    let opts = QuadOptions::abs(0.25 * tol);
    let near = |x: f64| {
        let u = xi * x;
        let h = (0.5 * u).sin();
        Complex64::new(2.0 * h * h, u_minus_sin(u)) * levy.density(x)
    };
    let far = |x: f64| {
        let u = xi * x;
        let h = (0.5 * u).sin();
        Complex64::new(2.0 * h * h, -u.sin()) * levy.density(x)
    };
    let mut jumps = integrate_complex(near, -1.0, 0.0, 1, &opts).into_result()?;
    jumps += integrate_complex(near, 0.0, 1.0, 1, &opts).into_result()?;
    jumps += integrate_complex_tail(far, 1.0, true, &opts).into_result()?;
    jumps += integrate_complex_tail(far, -1.0, false, &opts).into_result()?;
    Ok(base + jumps)
}

/// Risk-neutral drift: the `μ` with `ψ(-i) = -r`, in closed form.
///
/// Only `ν`, `c±`, `λ±` of `params` are read.
pub fn calibrate_drift(params: &KoBoLParams, r: f64) -> Result<f64> {
    check_order(params.nu)?;
    if !(params.lambda_plus > 1.0) {
        return Err(Error::Domain("lambda_plus must exceed 1 for the drift condition"));
    }
    if !(params.lambda_minus < -1.0) {
        return Err(Error::Domain("lambda_minus must be below -1 for the drift condition"));
    }
    if !(params.c_plus >= 0.0 && params.c_minus >= 0.0) {
        return Err(Error::Domain("intensities must be nonnegative"));
    }
    if !r.is_finite() {
        return Err(Error::Domain("rate must be finite"));
    }
    let jumps = params.jump_part(Complex64::new(0.0, -1.0));
    Ok(r + jumps.re)
}
