#![allow(dead_code)]

use levy_pricer_core::{KoBoLParams, SamplingPlan};

pub const M_BENCH: f64 = 9.702279703;
pub const DELTA: f64 = 2.0;
pub const ALPHA: f64 = 3.0;
pub const T: f64 = 0.5;
pub const EPS_TOTAL: f64 = 2.312260033e-5;

/// (ε, σ, h)
pub const SIGMA_TABLE: [(f64, f64, f64); 8] = [
    (1e-3, 4.710840317, 0.6668858297),
    (1e-4, 5.862132863, 0.5359129053),
    (1e-5, 7.013425410, 0.4479398397),
    (1e-6, 8.164717956, 0.3847766292),
    (1e-7, 9.316010503, 0.3372251086),
    (1e-8, 10.46730305, 0.3001339159),
    (1e-9, 11.61859560, 0.2703934935),
    (1e-10, 12.76988814, 0.2460156752),
];

/// (A, ε*)
pub const TAIL_TABLE: [(f64, f64); 13] = [
    (10.0, 6.626537364e-2),
    (20.0, 5.781601106e-3),
    (30.0, 7.180593247e-4),
    (40.0, 1.138385230e-4),
    (50.0, 2.153105090e-5),
    (60.0, 4.657594108e-6),
    (70.0, 1.120585522e-6),
    (80.0, 2.940645917e-7),
    (90.0, 8.298093791e-8),
    (100.0, 2.491098701e-8),
    (110.0, 7.889750755e-9),
    (120.0, 2.618921335e-9),
    (130.0, 9.062377049e-10),
];

pub fn model() -> KoBoLParams {
    KoBoLParams::benchmark()
}

pub fn plan() -> SamplingPlan {
    SamplingPlan::new(9.316010503, 50.0, ALPHA, 1e-7, DELTA).unwrap()
}
