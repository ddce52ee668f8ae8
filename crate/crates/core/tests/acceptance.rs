mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{DELTA, EPS_TOTAL, M_BENCH, SIGMA_TABLE, TAIL_TABLE};
use levy_pricer_core::{
    black_scholes_reference, calibrate_drift, compute_m, density_approximant, density_quadrature, make_contour,
    make_plan, price_quadrature, price_series, sigma_for_eps, tail_eps, verify_arc_decay, wks_interpolate,
    ArcDecayOptions, CharacteristicExponent, Complex64, ContourKind, GaussianParams, KoBoLParams, MarketSpec,
    PlanRequest, SampleGrid,
};
use levy_pricer_core::sampling::sinc;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Option<Duration>, elapsed: Duration, out: Outcome) -> Outcome {
    match (limit, out) {
        (Some(l), Ok(d)) if elapsed > l => Err(format!("{d}; took {elapsed:?}, limit {l:?}")),
        (_, out) => out,
    }
}

fn sigma_table() -> Outcome {
    let mut worst = 0.0f64;
    for (eps, sigma, h) in SIGMA_TABLE {
        let (s, step) = sigma_for_eps(M_BENCH, DELTA, eps).map_err(|e| e.to_string())?;
        worst = worst.max((s - sigma).abs()).max((step - h).abs());
        if (step - PI / s).abs() > 1e-15 {
            return Err(format!("h != π/σ at ε={eps:e}"));
        }
    }
    check(worst < 1e-6, format!("max deviation {worst:.3e}"))
}

fn strip_bound() -> Outcome {
    let b = compute_m(&common::model(), 3.0, 2.0, 0.5).map_err(|e| e.to_string())?;
    check((b.m - M_BENCH).abs() < 1e-6, format!("M = {:.10}", b.m))
}

fn drift() -> Outcome {
    let base = KoBoLParams { mu: 0.0, ..common::model() };
    let mu = calibrate_drift(&base, 0.1).map_err(|e| e.to_string())?;
    let cal = base.calibrated(0.1).map_err(|e| e.to_string())?;
    let resid = (cal.psi(Complex64::new(0.0, -1.0)).map_err(|e| e.to_string())? + 0.1).norm();
    check(
        (mu - 0.019721).abs() < 5e-6 && resid < 1e-12,
        format!("mu = {mu:.9}, |psi(-i) + r| = {resid:.2e}"),
    )
}

fn tail_table() -> Outcome {
    let p = common::model();
    let mut worst = 0.0f64;
    for (i, (a, want)) in TAIL_TABLE.iter().enumerate() {
        let got = tail_eps(&p, 0.5, *a, 3.0).map_err(|e| e.to_string())?;
        let rel = (got / want - 1.0).abs();
        let tol = if i >= 11 { 1e-2 } else { 1e-3 };
        if rel >= tol {
            return Err(format!("A={a}: {got:.9e} vs {want:.9e}"));
        }
        worst = worst.max(rel);
    }
    Ok(format!("max relative deviation {worst:.2e}"))
}

fn budget() -> Outcome {
    let req = PlanRequest {
        maturity: 0.5,
        alpha_plus: None,
        epsilon: 1e-7,
        truncation: 50.0,
        delta: None,
    };
    let (plan, b) = make_plan(&common::model(), &req).map_err(|e| e.to_string())?;
    let rel = (b.eps_total / EPS_TOTAL - 1.0).abs();
    check(
        plan.n == 149 && rel < 1e-3,
        format!("N = {}, total = {:.9e}", plan.n, b.eps_total),
    )
}

fn density_agreement() -> Outcome {
    let p = common::model();
    let plan = common::plan();
    let c = make_contour(ContourKind::Flat, 3.0).map_err(|e| e.to_string())?;
    let mut worst = (0.0f64, 0.0);
    for j in 0..21 {
        let y = -3.0 + 0.3 * j as f64;
        let a = density_approximant(&p, &c, 0.5, y, &plan).map_err(|e| e.to_string())?;
        let q = density_quadrature(&p, 0.5, y, 3.0, 50.0, 1e-11).map_err(|e| e.to_string())?.value;
        let d = (a - q).abs();
        if d > worst.0 {
            worst = (d, y);
        }
    }
    check(
        worst.0 <= EPS_TOTAL,
        format!("max |p* - p| = {:.3e} at y = {:.1}", worst.0, worst.1),
    )
}

fn gaussian() -> Outcome {
    let vol = 0.25;
    let (r, t) = (0.1, 0.5);
    let g = GaussianParams::risk_neutral(vol, r).map_err(|e| e.to_string())?;
    let (m, v) = (g.b * t, g.a * t);
    let mut dens = 0.0f64;
    for j in 0..11 {
        let y = m - 0.5 + 0.1 * j as f64;
        let got = density_quadrature(&g, t, y, 1.0, 200.0, 1e-12).map_err(|e| e.to_string())?.value;
        let want = (-(y - m) * (y - m) / (2.0 * v)).exp() / (2.0 * PI * v).sqrt();
        dens = dens.max((got - want).abs());
    }
    let mut price = 0.0f64;
    for k in [90.0, 100.0, 110.0] {
        let mk = MarketSpec::new(100.0, k, r, t).map_err(|e| e.to_string())?;
        let got = price_quadrature(&g, &mk, 2.0, 200.0, 1e-9).map_err(|e| e.to_string())?.price;
        price = price.max((got - black_scholes_reference(&mk, vol)).abs());
    }
    check(
        dens < 1e-9 && price < 1e-6,
        format!("density {dens:.2e}, price {price:.2e}"),
    )
}

fn contour_invariance() -> Outcome {
    let p = common::model();
    let plan = common::plan();
    let mut problems = Vec::new();
    let mut worst = 0.0f64;
    for k in [80.0, 90.0, 100.0, 110.0, 120.0] {
        let mk = MarketSpec::new(100.0, k, 0.1, 0.5).map_err(|e| e.to_string())?;
        let oracle = price_quadrature(&p, &mk, 3.0, 400.0, 1e-8).map_err(|e| e.to_string())?.price;
        let mut got = Vec::new();
        for kind in [ContourKind::Flat, ContourKind::Parabola, ContourKind::Cosh] {
            let c = make_contour(kind, 3.0).map_err(|e| e.to_string())?;
            match price_series(&p, &c, &mk, &plan) {
                Ok(r) => {
                    let d = (r.price - oracle).abs();
                    worst = worst.max(d);
                    if d > 5e-3 {
                        problems.push(format!("K={k} {}: off oracle by {d:.2e}", kind.name()));
                    }
                    got.push(r.price);
                }
                Err(e) => problems.push(format!("K={k} {}: {e}", kind.name())),
            }
        }
        for i in 0..got.len() {
            for j in i + 1..got.len() {
                if (got[i] - got[j]).abs() > 1e-3 {
                    problems.push(format!("K={k}: contours disagree by {:.2e}", (got[i] - got[j]).abs()));
                }
            }
        }
    }
    if problems.is_empty() {
        Ok(format!("max deviation from oracle {worst:.2e}"))
    } else {
        Err(format!("{} breaches; {}", problems.len(), problems.join("; ")))
    }
}

fn wks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let sigma = rng.gen_range(0.5..20.0);
        let n = rng.gen_range(0..20usize);
        let values: Vec<Complex64> = (0..2 * n + 1)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let grid = SampleGrid::new(sigma, values.clone()).map_err(|e| e.to_string())?;
        for k in -(n as i64)..=n as i64 {
            if wks_interpolate(&grid, grid.node(k)) != grid.value(k).unwrap() {
                return Err(format!("node {k} not reproduced at sigma={sigma}"));
            }
        }
        let span = grid.radius() + 3.0 * PI / sigma;
        for _ in 0..101 {
            let x = rng.gen_range(-span..span);
            let direct: Complex64 = values
                .iter()
                .enumerate()
                .map(|(i, v)| v * sinc(sigma * x - PI * (i as f64 - n as f64)))
                .sum();
            worst = worst.max((wks_interpolate(&grid, x) - direct).norm());
        }
    }
    check(worst < 1e-10, format!("max off-node error {worst:.2e}"))
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.2e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn arc_decay() -> Outcome {
    let c = make_contour(ContourKind::Flat, 3.0).map_err(|e| e.to_string())?;
    let rep = verify_arc_decay(
        &common::model(),
        &c,
        0.5,
        0.5,
        &[10.0, 20.0, 40.0, 80.0],
        &ArcDecayOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let strict = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    check(
        rep.verified() && strict(&rep.right) && strict(&rep.left),
        format!("right {}, left {}", sci(&rep.right), sci(&rep.left)),
    )
}

fn main() -> ExitCode {
    let ms = Duration::from_millis;
    let criteria: [Criterion; 10] = [
        ("sigma/h table", Some(ms(1)), sigma_table),
        ("strip bound M", Some(ms(1000)), strip_bound),
        ("drift calibration", None, drift),
        ("tail table", Some(ms(5000)), tail_table),
        ("composite budget", None, budget),
        ("density oracle agreement", Some(ms(10_000)), density_agreement),
        ("gaussian sanity", None, gaussian),
        ("contour invariance", Some(ms(30_000)), contour_invariance),
        ("wks exactness", None, wks),
        ("arc decay", None, arc_decay),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let out = within(*limit, elapsed, out);
        let (tag, detail) = match &out {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {}: {tag} {name} ({elapsed:.2?}) {detail}", i + 1);
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
