//! Globally adaptive Gauss-Kronrod (G10/K21) quadrature for real and complex integrands.
//!
//! Segments are bisected largest-error first until the summed error estimate
//! meets `max(abs_tol, rel_tol·|I|)` or the rounding floor `100ε∫|f|`.
//! A segment deeper than `max_depth` bisections is frozen. The final value is re-summed in left-to-right order
//! with compensated accumulation, so results do not depend on refinement order.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sum::{ComplexSum, NeumaierSum};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_478_877,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Values the quadrature can accumulate.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    #[inline]
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    #[inline]
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Stopping rules for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub max_segments: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_depth: 60,
            max_segments: 200_000,
        }
    }
}

impl QuadOptions {
    pub fn abs(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    pub fn with_rel(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<V> {
    pub value: V,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
    tolerance: f64,
}

impl<V: QuadValue> Estimate<V> {
    /// Turns a non-converged estimate into [`Error::Quadrature`].
    pub fn into_result(self) -> Result<V> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::Quadrature {
                estimate: self.value.magnitude(),
                error: self.error,
                tolerance: self.tolerance,
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
    abs: f64,
    depth: u32,
}

impl<V> PartialEq for Segment<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl<V> Eq for Segment<V> {}

impl<V> PartialOrd for Segment<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<V> Ord for Segment<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> (V, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let f_center = f(center);
    let mut res_k = f_center * WGK[10];
    let mut res_g = V::default();
    let mut res_abs = f_center.magnitude() * WGK[10];
    let mut fv1 = [V::default(); 10];
    let mut fv2 = [V::default(); 10];

    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k = res_k + (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            res_g = res_g + (f1 + f2) * WG[j / 2];
        }
    }

    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (f_center - mean).magnitude();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }

    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut err = ((res_k - res_g) * half).magnitude();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * libm::pow(200.0 * err / res_asc, 1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.magnitude().is_finite() {
        err = f64::INFINITY;
    }
    (value, err, res_abs)
}

fn finish<V: QuadValue>(
    mut segs: Vec<Segment<V>>,
    evaluations: usize,
    opts: &QuadOptions,
    sum: impl Fn(&[Segment<V>]) -> V,
) -> Estimate<V> {
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = sum(&segs);
    let mut err = NeumaierSum::new();
    let mut abs = NeumaierSum::new();
    for s in &segs {
        err.add(s.error);
        abs.add(s.abs);
    }
    let error = err.value();
    let tolerance = opts.target(value.magnitude()).max(roundoff_floor(abs.value()));
    Estimate {
        value,
        error,
        evaluations,
        converged: error.is_finite() && error <= tolerance,
        tolerance,
    }
}

// Below this the estimate is dominated by rounding in the integrand itself.
fn roundoff_floor(abs_integral: f64) -> f64 {
    100.0 * f64::EPSILON * abs_integral
}

fn adaptive<V, F, S>(mut f: F, initial: &[(f64, f64)], opts: &QuadOptions, sum: S) -> Estimate<V>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
    S: Fn(&[Segment<V>]) -> V,
{
    let mut heap = BinaryHeap::with_capacity(initial.len() * 4);
    let mut frozen: Vec<Segment<V>> = Vec::new();
    let mut frozen_err = 0.0;
    let mut evaluations = 0usize;
    let mut total_err = 0.0;
    let mut total_abs = 0.0;
    let mut total_val = V::default();

    for &(a, b) in initial {
        let (value, error, abs) = kronrod21(&mut f, a, b);
        evaluations += 21;
        total_err += error;
        total_abs += abs;
        total_val = total_val + value;
        heap.push(Segment {
            a,
            b,
            value,
            error,
            abs,
            depth: 0,
        });
    }

    while total_err > opts.target(total_val.magnitude()).max(roundoff_floor(total_abs)) && total_err.is_finite() {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        let too_small = !(worst.a < mid && mid < worst.b);
        if worst.depth >= opts.max_depth || too_small {
            frozen_err += worst.error;
            frozen.push(worst);
            if heap.is_empty() || frozen_err > opts.target(total_val.magnitude()).max(roundoff_floor(total_abs)) {
                break;
            }
            continue;
        }
        if heap.len() + frozen.len() >= opts.max_segments {
            heap.push(worst);
            break;
        }
        let (v1, e1, s1) = kronrod21(&mut f, worst.a, mid);
        let (v2, e2, s2) = kronrod21(&mut f, mid, worst.b);
        evaluations += 42;
        total_err += e1 + e2 - worst.error;
        total_abs += s1 + s2 - worst.abs;
        total_val = total_val + v1 + v2 - worst.value;
        let depth = worst.depth + 1;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            abs: s1,
            depth,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            abs: s2,
            depth,
        });
    }

    frozen.extend(heap);
    finish(frozen, evaluations, opts, sum)
}

fn sum_real(segs: &[Segment<f64>]) -> f64 {
    let mut acc = NeumaierSum::new();
    for s in segs {
        acc.add(s.value);
    }
    acc.value()
}

fn sum_cplx(segs: &[Segment<Complex64>]) -> Complex64 {
    let mut acc = ComplexSum::new();
    for s in segs {
        acc.add(s.value);
    }
    acc.value()
}

fn split(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == panels { b } else { a + width * (i + 1) as f64 };
            (lo, hi)
        })
        .collect()
}

/// Real integral of `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Estimate<f64> {
    integrate_panels(f, a, b, 1, opts)
}

/// Real integral over `[a, b]`, starting from `panels` equal pieces (useful for oscillatory integrands).
pub fn integrate_panels<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    panels: usize,
    opts: &QuadOptions,
) -> Estimate<f64> {
    if a == b {
        return finish(Vec::new(), 0, opts, sum_real);
    }
    adaptive(f, &split(a, b, panels), opts, sum_real)
}

/// Complex integral over `[a, b]`, starting from `panels` equal pieces.
pub fn integrate_complex<F: FnMut(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    panels: usize,
    opts: &QuadOptions,
) -> Estimate<Complex64> {
    if a == b {
        return finish(Vec::new(), 0, opts, sum_cplx);
    }
    adaptive(f, &split(a, b, panels), opts, sum_cplx)
}

/// Complex integral over `[a, ∞)` (`upward`) or `(-∞, a]`, through `x = a ± t/(1-t)`.
pub fn integrate_complex_tail<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    upward: bool,
    opts: &QuadOptions,
) -> Estimate<Complex64> {
    let sign = if upward { 1.0 } else { -1.0 };
    let mapped = move |t: f64| {
        let s = 1.0 - t;
        let x = a + sign * t / s;
        f(x) * (1.0 / (s * s))
    };
    // geometric pre-split towards t = 1 where the map compresses the tail
    let cuts = [0.0, 0.5, 0.75, 0.875, 0.9375, 0.96875, 0.984375, 1.0];
    let initial: Vec<(f64, f64)> = cuts.windows(2).map(|w| (w[0], w[1])).collect();
    adaptive(mapped, &initial, opts, sum_cplx)
}

/// Real integral over `[a, ∞)` (`upward`) or `(-∞, a]`.
pub fn integrate_tail<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    upward: bool,
    opts: &QuadOptions,
) -> Estimate<f64> {
    let sign = if upward { 1.0 } else { -1.0 };
    let mapped = move |t: f64| {
        let s = 1.0 - t;
        f(a + sign * t / s) / (s * s)
    };
    let cuts = [0.0, 0.5, 0.75, 0.875, 0.9375, 0.96875, 0.984375, 1.0];
    let initial: Vec<(f64, f64)> = cuts.windows(2).map(|w| (w[0], w[1])).collect();
    adaptive(mapped, &initial, opts, sum_real)
}
