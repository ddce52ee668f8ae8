//! Pricing of European calls under exponential-Lévy models.
//!
//! The crate evaluates transition densities and call prices three ways:
//! a direct damped Fourier quadrature (the reference path), a contour-deformed
//! integral, and a cardinal-series approximant sampled on the nodes `πk/σ` of a
//! Wiener space `W_σ`. The [`budget`] module turns a target interpolation error
//! into a band limit, a step and a term count, and accounts for the truncation
//! tail.
//!
//! Everything here is pure and allocation-light; the crate is `no_std` and only
//! needs `alloc`. File formats and the command-line front end live in the
//! companion `levy-pricer` crate.
//!
//! # Conventions
//!
//! A characteristic exponent `ψ` satisfies `E[exp(iξX_t)] = exp(-tψ(ξ))`.
//! Densities are recovered with `p_t(y) = (1/2π)∫ exp(-iyξ - tψ(ξ)) dξ`; all
//! deformation contours live in the upper half-plane of the inversion variable
//! `η = -ξ` (see [`charexp::Reflected`]).
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod budget;
pub mod charexp;
pub mod contour;
pub mod density;
mod error;
mod math;
pub mod pricer;
pub mod quad;
pub mod sampling;
pub mod sum;

pub use num_complex::Complex64;

pub use crate::budget::{
    compute_m, heuristic_alpha_plus, make_plan, sigma_for_eps, tail_eps, ErrorBudget, PlanRequest,
    SamplingPlan, StripBound,
};
pub use crate::charexp::{
    calibrate_drift, gaussian_psi, kobol_psi, levy_khintchine_psi_numeric, CharacteristicExponent,
    GaussianParams, KoBoLParams, LevyMeasureSpec, Reflected, Strip,
};
pub use crate::contour::{
    eval_contour, make_contour, verify_arc_decay, ArcDecayOptions, ArcFamily, ContourKind,
    ContourShape, ContourSpec, DecayReport,
};
pub use crate::density::{
    density_approximant, density_contour, density_quadrature, DensityCurve, DensityEstimate,
    DensityMethod,
};
pub use crate::error::{Error, Result};
pub use crate::pricer::{
    black_scholes_reference, price_quadrature, price_series, MarketSpec, PriceMethod, PriceResult,
};
pub use crate::sampling::{best_approx_bound, wks_interpolate, SampleGrid};
