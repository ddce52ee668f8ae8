//! Error budget: strip bound `M`, band limit `σ(ε)`, step `h = π/σ`, truncation
//! tail `ε*(A)`, total error `ϵ = Aε/π + ε*`, and term count `N = ⌈Aσ/π⌉`.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods once std is linked
use num_traits::Float;

use crate::charexp::CharacteristicExponent;
use crate::error::{Error, Result};
use crate::quad::{integrate_complex_tail, QuadOptions};

/// Where and how the strip maximum was found.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripBound {
    pub m: f64,
    /// Real coordinate of the maximiser.
    pub x: f64,
    /// Imaginary coordinate (`α₊ ± δ`) of the boundary line holding the maximum.
    pub line: f64,
    /// Half-width of the final scan window.
    pub window: f64,
    /// Whether both boundary lines decayed below `1e-3·M` at the window edge.
    pub decayed: bool,
}

const SCAN_POINTS: usize = 2001;
const INITIAL_WINDOW: f64 = 10.0;
const MAX_WINDOW: f64 = 1.0e4;

fn boundary_value<E: CharacteristicExponent>(psi: &E, t: f64, x: f64, line: f64) -> Result<f64> {
    Ok((-psi.psi(Complex64::new(x, line))? * t).exp().re.abs())
}

fn golden_max<F: FnMut(f64) -> Result<f64>>(mut g: F, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut gc = g(c)?;
    let mut gd = g(d)?;
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d)?;
        }
    }
    Ok(if gc >= gd { (c, gc) } else { (d, gd) })
}

/// `max |Re e^{-Tψ(x + i(α₊ ± δ))}|` over both boundary lines of the strip around the damping line.
///
/// The lines are scanned on a grid over `[-X, X]` (always including `x = 0`),
/// with `X` doubled until the edges drop below `1e-3·M`, and the best grid
/// point is refined by golden-section search.
pub fn compute_m<E: CharacteristicExponent>(psi: &E, alpha_plus: f64, delta: f64, t: f64) -> Result<StripBound> {
    if !(delta > 0.0) || !(t >= 0.0) {
        return Err(Error::Domain("delta must be positive and T nonnegative"));
    }
    let strip = psi.strip();
    let lines = [alpha_plus + delta, alpha_plus - delta];
    for &line in &lines {
        if !strip.contains(line) {
            return Err(Error::StripViolation {
                im: line,
                lower: strip.lower,
                upper: strip.upper,
            });
        }
    }

    let mut window = INITIAL_WINDOW;
    loop {
        let step = 2.0 * window / (SCAN_POINTS - 1) as f64;
        let mut best = StripBound {
            m: f64::NEG_INFINITY,
            x: 0.0,
            line: lines[0],
            window,
            decayed: false,
        };
        for &line in &lines {
            for j in 0..SCAN_POINTS {
                let x = if j == (SCAN_POINTS - 1) / 2 { 0.0 } else { -window + step * j as f64 };
                let v = boundary_value(psi, t, x, line)?;
                if v > best.m {
                    best.m = v;
                    best.x = x;
                    best.line = line;
                }
            }
        }
        let mut edge = 0.0f64;
        for &line in &lines {
            edge = edge.max(boundary_value(psi, t, window, line)?);
            edge = edge.max(boundary_value(psi, t, -window, line)?);
        }
        best.decayed = edge < 1e-3 * best.m;
        if best.decayed || window >= MAX_WINDOW {
            let line = best.line;
            let (x, v) = golden_max(|x| boundary_value(psi, t, x, line), best.x - step, best.x + step)?;
            if v > best.m {
                best.m = v;
                best.x = x;
            }
            if !best.m.is_finite() {
                return Err(Error::Domain("strip bound is not finite"));
            }
            return Ok(best);
        }
        window *= 2.0;
    }
}

/// `σ = δ⁻¹ ln(4M/(πε))` and `h = π/σ`.
pub fn sigma_for_eps(m: f64, delta: f64, eps: f64) -> Result<(f64, f64)> {
    if !(m > 0.0 && delta > 0.0 && eps > 0.0) {
        return Err(Error::Domain("M, delta and epsilon must be positive"));
    }
    if eps >= 4.0 * m / PI {
        return Err(Error::Domain("epsilon must be below 4M/pi"));
    }
    let sigma = (4.0 * m / (PI * eps)).ln() / delta;
    Ok((sigma, PI / sigma))
}

/// Truncation tail `(1/2π)·max(|∫_A^∞ e^{-Tψ(y+iα₊)} dy|, |∫_{-∞}^{-A} e^{-Tψ(y+iα₊)} dy|)`.
///
/// For an exponent symmetric under `y ↦ -y` on the line the two sides agree.
pub fn tail_eps<E: CharacteristicExponent>(psi: &E, t: f64, a: f64, alpha_plus: f64) -> Result<f64> {
    if !(a > 0.0) || !(t > 0.0) {
        return Err(Error::Domain("A and T must be positive"));
    }
    let strip = psi.strip();
    if !strip.contains(alpha_plus) {
        return Err(Error::StripViolation {
            im: alpha_plus,
            lower: strip.lower,
            upper: strip.upper,
        });
    }
    let opts = QuadOptions::abs(1e-300).with_rel(1e-9);
    let side = |upward: bool| -> Result<f64> {
        let mut failure = None;
        let f = |y: f64| match psi.psi(Complex64::new(y, alpha_plus)) {
            Ok(p) => (-p * t).exp(),
            Err(e) => {
                failure.get_or_insert(e);
                Complex64::default()
            }
        };
        let start = if upward { a } else { -a };
        let est = integrate_complex_tail(f, start, upward, &opts);
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(est.into_result()?.norm())
    };
    let right = side(true)?;
    let left = side(false)?;
    Ok(right.max(left) / (2.0 * PI))
}

/// `α₊ = 1 + (λ₊ + 1)/3`, an empirical default for the damping offset.
pub fn heuristic_alpha_plus(lambda_plus: f64) -> f64 {
    1.0 + (lambda_plus + 1.0) / 3.0
}

/// Everything needed to evaluate a sampled approximant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingPlan {
    pub sigma: f64,
    pub h: f64,
    /// Truncation radius `A`.
    pub a: f64,
    /// Term count: nodes `k = -N..=N`.
    pub n: usize,
    pub alpha_plus: f64,
    pub epsilon: f64,
    pub delta: f64,
    /// `alpha_plus` came from [`heuristic_alpha_plus`] rather than the caller.
    pub alpha_heuristic: bool,
}

impl SamplingPlan {
    pub fn new(sigma: f64, a: f64, alpha_plus: f64, epsilon: f64, delta: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::PlanInconsistent("sigma must be positive and finite"));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::PlanInconsistent("truncation A must be positive and finite"));
        }
        let count = (a * sigma / PI).ceil();
        if count > 1e8 {
            return Err(Error::PlanInconsistent("term count exceeds 1e8"));
        }
        let plan = Self {
            sigma,
            h: PI / sigma,
            a,
            n: count as usize,
            alpha_plus,
            epsilon,
            delta,
            alpha_heuristic: false,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// Checks `hσ = π`, `N = ⌈Aσ/π⌉`, `ε > 0`, `δ > 0`.
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::PlanInconsistent("sigma must be positive and finite"));
        }
        if (self.h * self.sigma - PI).abs() > 4.0 * f64::EPSILON * PI {
            return Err(Error::PlanInconsistent("step must equal pi/sigma"));
        }
        if self.n as f64 != (self.a * self.sigma / PI).ceil() {
            return Err(Error::PlanInconsistent("term count must equal ceil(A sigma / pi)"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::PlanInconsistent("epsilon must be positive"));
        }
        if !(self.delta > 0.0) {
            return Err(Error::PlanInconsistent("strip half-width delta must be positive"));
        }
        if !self.alpha_plus.is_finite() {
            return Err(Error::PlanInconsistent("alpha_plus must be finite"));
        }
        Ok(())
    }

    /// Node `θ_k = kπ/σ`.
    pub fn node(&self, k: i64) -> f64 {
        k as f64 * self.h
    }
}

/// The error accounting that goes with a [`SamplingPlan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBudget {
    pub eps_interp: f64,
    pub eps_tail: f64,
    pub eps_total: f64,
    pub m: f64,
}

impl ErrorBudget {
    /// `ϵ = Aε/π + ε*`.
    pub fn compose(eps_interp: f64, eps_tail: f64, a: f64, m: f64) -> Result<Self> {
        if !(eps_interp >= 0.0 && eps_tail >= 0.0 && a >= 0.0) {
            return Err(Error::Domain("budget components must be nonnegative"));
        }
        Ok(Self {
            eps_interp,
            eps_tail,
            eps_total: a * eps_interp / PI + eps_tail,
            m,
        })
    }
}

/// Inputs to [`make_plan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanRequest {
    pub maturity: f64,
    /// Damping offset; `None` picks [`heuristic_alpha_plus`] from the strip's upper edge.
    pub alpha_plus: Option<f64>,
    pub epsilon: f64,
    pub truncation: f64,
    /// Strip half-width; `None` uses the distance from `α₊` to the strip's upper edge.
    pub delta: Option<f64>,
}

/// `M → σ(ε) → ε*(A)`, then `N = ⌈Aσ/π⌉` and `ϵ = Aε/π + ε*`.
pub fn make_plan<E: CharacteristicExponent>(psi: &E, req: &PlanRequest) -> Result<(SamplingPlan, ErrorBudget)> {
    let upper = psi.strip().upper;
    let (alpha, heuristic) = match req.alpha_plus {
        Some(a) => (a, false),
        None if upper.is_finite() => (heuristic_alpha_plus(upper), true),
        None => return Err(Error::Domain("alpha_plus is required when the strip is unbounded")),
    };
    let delta = match req.delta {
        Some(d) => d,
        None if upper.is_finite() => upper - alpha,
        None => return Err(Error::Domain("delta is required when the strip is unbounded")),
    };
    if !(delta > 0.0) {
        return Err(Error::StripViolation {
            im: alpha,
            lower: psi.strip().lower,
            upper,
        });
    }
    let bound = compute_m(psi, alpha, delta, req.maturity)?;
    let (sigma, _) = sigma_for_eps(bound.m, delta, req.epsilon)?;
    let tail = tail_eps(psi, req.maturity, req.truncation, alpha)?;
    let mut plan = SamplingPlan::new(sigma, req.truncation, alpha, req.epsilon, delta)?;
    plan.alpha_heuristic = heuristic;
    let budget = ErrorBudget::compose(req.epsilon, tail, req.truncation, bound.m)?;
    Ok((plan, budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charexp::KoBoLParams;
    use crate::sampling::best_approx_bound;

    const M: f64 = 9.702279703;

    #[test]
    fn sigma_rows() {
        let (s, h) = sigma_for_eps(M, 2.0, 1e-3).unwrap();
        assert!((s - 4.710840317).abs() < 1e-8 && (h - 0.6668858297).abs() < 1e-8);
        let (s, h) = sigma_for_eps(M, 2.0, 1e-7).unwrap();
        assert!((s - 9.316010503).abs() < 1e-8 && (h - 0.3372251086).abs() < 1e-8);
        let eps = 4.0 * M / PI * (-4.0f64).exp();
        assert!((sigma_for_eps(M, 2.0, eps).unwrap().0 - 2.0).abs() < 1e-14);
        assert!(sigma_for_eps(M, 2.0, 4.0 * M / PI).is_err());
    }

    #[test]
    fn round_trip() {
        for e in 3..=10 {
            let eps = 10f64.powi(-e);
            let (s, _) = sigma_for_eps(M, 2.0, eps).unwrap();
            assert!((best_approx_bound(M, 2.0, s) / eps - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn strip_bound_benchmark() {
        let b = compute_m(&KoBoLParams::benchmark(), 3.0, 2.0, 0.5).unwrap();
        assert!((b.m - 9.702279703).abs() < 1e-6, "{b:?}");
        assert_eq!(b.line, 5.0);
        assert!(b.x.abs() < 1e-6);
        assert!(b.decayed);
    }

    #[test]
    fn strip_bound_at_zero_time() {
        let b = compute_m(&KoBoLParams::benchmark(), 3.0, 2.0, 0.0).unwrap();
        assert_eq!(b.m, 1.0);
        assert!(!b.decayed);
    }

    #[test]
    fn strip_bound_outside_strip() {
        assert!(matches!(
            compute_m(&KoBoLParams::benchmark(), 3.0, 2.5, 0.5),
            Err(Error::StripViolation { .. })
        ));
    }

    #[test]
    fn tail_rows() {
        let p = KoBoLParams::benchmark();
        for (a, want, tol) in [(10.0, 6.626537364e-2, 1e-3), (50.0, 2.153105090e-5, 1e-3), (130.0, 9.062377049e-10, 1e-2)] {
            let got = tail_eps(&p, 0.5, a, 3.0).unwrap();
            assert!((got / want - 1.0).abs() < tol, "A={a}: {got:e}");
        }
    }

    #[test]
    fn plan_benchmark() {
        let req = PlanRequest {
            maturity: 0.5,
            alpha_plus: None,
            epsilon: 1e-7,
            truncation: 50.0,
            delta: None,
        };
        let (plan, budget) = make_plan(&KoBoLParams::benchmark(), &req).unwrap();
        assert!(plan.alpha_heuristic);
        assert_eq!(plan.alpha_plus, 3.0);
        assert_eq!(plan.delta + plan.alpha_plus, 5.0);
        assert_eq!(plan.n, 149);
        assert!((plan.sigma - 9.316010503).abs() < 1e-6);
        assert!((budget.eps_total / 2.312260033e-5 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn budget_composition() {
        let b = ErrorBudget::compose(1e-4, 1.138385230e-4, 40.0, M).unwrap();
        assert!((b.eps_total - (40.0 * 1e-4 / PI + 1.138385230e-4)).abs() < 1e-18);
        assert_eq!(ErrorBudget::compose(0.0, 0.0, 1e6, M).unwrap().eps_total, 0.0);
    }

    #[test]
    fn plan_validation() {
        let plan = SamplingPlan::new(9.316010503, 50.0, 3.0, 1e-7, 2.0).unwrap();
        assert_eq!(plan.n, 149);
        let bad = SamplingPlan { n: 148, ..plan };
        assert!(matches!(bad.validate(), Err(Error::PlanInconsistent(_))));
        let bad = SamplingPlan { h: 0.3, ..plan };
        assert!(bad.validate().is_err());
        assert_eq!(heuristic_alpha_plus(5.0), 3.0);
    }
}
