//! Cardinal (WKS) series on the nodes `πk/σ` and the best-approximation bound for `W_σ`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods once std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::sum::ComplexSum;

pub use crate::math::sinc;

/// Samples `values[k + N]` of a function at `θ_k = πk/σ`, `|k| ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    sigma: f64,
    n: usize,
    values: Vec<Complex64>,
}

impl SampleGrid {
    /// `values` must have odd length `2N + 1` and be finite.
    pub fn new(sigma: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain("band limit sigma must be positive and finite"));
        }
        if values.len().is_multiple_of(2) {
            return Err(Error::Domain("sample count must be odd (nodes -N..=N)"));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Domain("samples must be finite"));
        }
        let n = (values.len() - 1) / 2;
        Ok(Self { sigma, n, values })
    }

    /// Samples `f` at every node.
    pub fn from_fn<F: FnMut(f64) -> Complex64>(sigma: f64, n: usize, mut f: F) -> Result<Self> {
        let h = PI / sigma;
        let values = (-(n as i64)..=n as i64).map(|k| f(k as f64 * h)).collect();
        Self::new(sigma, values)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn h(&self) -> f64 {
        PI / self.sigma
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Half-width `Nπ/σ` of the sampled interval.
    pub fn radius(&self) -> f64 {
        self.n as f64 * self.h()
    }

    pub fn node(&self, k: i64) -> f64 {
        k as f64 * self.h()
    }

    pub fn value(&self, k: i64) -> Option<Complex64> {
        let idx = k.checked_add(self.n as i64)?;
        usize::try_from(idx).ok().and_then(|i| self.values.get(i)).copied()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// `Σ_{|k|≤N} values[k]·sinc(σx − πk)`, summed in order `k = -N..=N`.
///
/// At a node the stored sample is returned exactly.
pub fn wks_interpolate(grid: &SampleGrid, x: f64) -> Complex64 {
    let t = grid.sigma * x / PI;
    let nearest = t.round();
    if (t - nearest).abs() <= 4.0 * f64::EPSILON * t.abs().max(1.0) {
        return grid.value(nearest as i64).unwrap_or_default();
    }
    // sin(π(t - k)) = (-1)^k sin(πt)
    let s = (PI * t).sin();
    let n = grid.n as i64;
    let mut acc = ComplexSum::new();
    for (i, v) in grid.values.iter().enumerate() {
        let k = i as i64 - n;
        let d = PI * (t - k as f64);
        let sk = if k % 2 == 0 { s } else { -s };
        acc.add(*v * (sk / d));
    }
    acc.value()
}

/// `(4M/π)e^{-δσ}`, the error bound for the best `W_σ` approximation of a function bounded by `M` on `|Im| ≤ δ`.
pub fn best_approx_bound(m: f64, delta: f64, sigma: f64) -> f64 {
    4.0 * m / PI * (-delta * sigma).exp()
}

/// `(4M/π) Σ_{k<terms} (-1)^k / ((2k+1) cosh((2k+1)σδ))`, the series the closed bound majorizes.
pub fn best_approx_series(m: f64, delta: f64, sigma: f64, terms: usize) -> f64 {
    let mut acc = 0.0;
    for k in 0..terms {
        let j = (2 * k + 1) as f64;
        let term = 1.0 / (j * (j * sigma * delta).cosh());
        if k % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    4.0 * m / PI * acc
}
