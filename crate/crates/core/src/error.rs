use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside the domain where the model or formula is defined.
    #[error("domain error: {0}")]
    Domain(&'static str),

    /// `ξ` lies on one of the vertical branch cuts of the exponent.
    #[error("branch cut: ψ is not defined at ξ = {re} + {im}i")]
    BranchCut { re: f64, im: f64 },

    /// The damping line or a contour leaves the analyticity strip.
    #[error("strip violation: Im = {im} is outside ({lower}, {upper})")]
    StripViolation { im: f64, lower: f64, upper: f64 },

    /// Adaptive quadrature gave up before reaching the tolerance.
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} > tolerance {tolerance:e}")]
    Quadrature {
        estimate: f64,
        error: f64,
        tolerance: f64,
    },

    /// A user contour breaks the sign or monotonicity requirements.
    #[error("contour invariant violated at θ = {theta}: {what}")]
    ContourInvariant { theta: f64, what: &'static str },

    /// The contour left the representable range before its integrand decayed.
    #[error("contour overflow at θ = {theta}: the integrand has not decayed where the path leaves f64 range")]
    ContourOverflow { theta: f64 },

    /// The sampling plan does not satisfy `hσ = π` and `N = ⌈Aσ/π⌉`, or does not match the contour.
    #[error("inconsistent sampling plan: {0}")]
    PlanInconsistent(&'static str),

    /// A quantity that must be real carried a large imaginary part.
    #[error("imaginary residue {residue:e} exceeds {limit:e}")]
    Residue { residue: f64, limit: f64 },

    /// Terms of a node sum grew without bound (the deformation is not valid here).
    #[error("series diverged: term magnitude {magnitude:e} against result {result:e}")]
    SeriesDiverged { magnitude: f64, result: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
