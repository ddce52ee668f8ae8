use levy_pricer_core::{
    compute_m, density_approximant, density_contour, density_quadrature, make_contour, make_plan, price_quadrature,
    price_series, sigma_for_eps, tail_eps, verify_arc_decay, ArcDecayOptions, ContourSpec, DensityCurve,
    DensityMethod, ErrorBudget, MarketSpec, PlanRequest, PriceMethod, SamplingPlan,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Auto, DensityChoice, Model, RunConfig};
use crate::error::{CliError, Result};
use crate::render::{cell, pick, sig10, Csv};

/// Rendered output plus the failure, if any, that should set the exit code
/// after the output has been written.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub failure: Option<CliError>,
}

const SIGMA_EPS: [f64; 8] = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10];

#[derive(Serialize)]
struct PlanOut {
    sigma: f64,
    h: f64,
    a: f64,
    n: usize,
    alpha_plus: f64,
    alpha_heuristic: bool,
    delta: f64,
    epsilon: f64,
}

impl From<&SamplingPlan> for PlanOut {
    fn from(p: &SamplingPlan) -> Self {
        Self {
            sigma: p.sigma,
            h: p.h,
            a: p.a,
            n: p.n,
            alpha_plus: p.alpha_plus,
            alpha_heuristic: p.alpha_heuristic,
            delta: p.delta,
            epsilon: p.epsilon,
        }
    }
}

#[derive(Serialize)]
struct BudgetOut {
    m: f64,
    eps_interp: f64,
    eps_tail: f64,
    eps_total: f64,
}

impl From<&ErrorBudget> for BudgetOut {
    fn from(b: &ErrorBudget) -> Self {
        Self {
            m: b.m,
            eps_interp: b.eps_interp,
            eps_tail: b.eps_tail,
            eps_total: b.eps_total,
        }
    }
}

fn plan_for(cfg: &mut RunConfig, model: &Model) -> Result<(SamplingPlan, ErrorBudget)> {
    let n = &cfg.numerics;
    let req = PlanRequest {
        maturity: cfg.market.t,
        alpha_plus: n.alpha_plus.value(),
        epsilon: n.epsilon,
        truncation: n.a,
        delta: n.delta.value(),
    };
    let (plan, budget) = make_plan(model, &req)?;
    cfg.numerics.alpha_plus = Auto::Value(plan.alpha_plus);
    cfg.numerics.delta = Auto::Value(plan.delta);
    Ok((plan, budget))
}

fn contour_for(cfg: &RunConfig, alpha_plus: f64) -> Result<ContourSpec> {
    Ok(make_contour(cfg.numerics.contour.into(), alpha_plus)?)
}

#[derive(Serialize)]
struct CheckOut {
    price: f64,
    error: f64,
    delta: f64,
    tol: f64,
    passed: bool,
}

#[derive(Serialize)]
struct PriceRow {
    strike: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    price: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    i1: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    i2: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<f64>,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<CheckOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
}

#[derive(Serialize)]
struct PriceReport<'a> {
    config: &'a RunConfig,
    plan: PlanOut,
    budget: BudgetOut,
    results: Vec<PriceRow>,
}

/// Series prices for every strike, optionally checked against the quadrature reference.
pub fn price(mut cfg: RunConfig, model: Model, check: bool) -> Result<Output> {
    let strikes = cfg.market.strike_list();
    if strikes.is_empty() {
        return Err(CliError::Validation("no strike given (market.strike, market.strikes or --strike)".into()));
    }
    let (plan, budget) = plan_for(&mut cfg, &model)?;
    let contour = contour_for(&cfg, plan.alpha_plus)?;
    let (m, n) = (&cfg.market, &cfg.numerics);
    let method = PriceMethod::Series(n.contour.into()).name();
    let rows: Vec<(PriceRow, Option<CliError>)> = strikes
        .par_iter()
        .map(|&k| -> Result<(PriceRow, Option<CliError>)> {
            let market = MarketSpec::new(m.s0, k, m.r, m.t)?;
            let mut row = PriceRow {
                strike: k,
                price: None,
                i1: None,
                i2: None,
                residue: None,
                error: None,
                method,
                check: None,
                failure: None,
            };
            let series = match price_series(&model, &contour, &market, &plan) {
                Ok(r) => r,
                Err(e) => {
                    let e = CliError::from(e);
                    row.failure = Some(e.to_string());
                    return Ok((row, Some(e)));
                }
            };
            row.price = Some(series.price);
            row.i1 = Some([series.i1.re, series.i1.im]);
            row.i2 = Some([series.i2.re, series.i2.im]);
            row.residue = Some(series.residue);
            row.error = Some(series.error);
            let mut failure = None;
            if check {
                let oracle = price_quadrature(&model, &market, plan.alpha_plus, n.oracle_a, n.oracle_tol)?;
                let delta = (series.price - oracle.price).abs();
                let passed = delta <= n.tol;
                if !passed {
                    failure = Some(CliError::CheckFailed(format!(
                        "K={k}: |series - quadrature| = {delta:e} > {:e}",
                        n.tol
                    )));
                }
                row.check = Some(CheckOut {
                    price: oracle.price,
                    error: oracle.error,
                    delta,
                    tol: n.tol,
                    passed,
                });
            }
            Ok((row, failure))
        })
        .collect::<Result<_>>()?;
    let mut failure = None;
    let mut results = Vec::with_capacity(rows.len());
    for (row, f) in rows {
        // numerical failures outrank check breaches
        failure = match (failure, f) {
            (None, f) => f,
            (Some(CliError::CheckFailed(_)), Some(f @ CliError::Numerical(_))) => Some(f),
            (old, _) => old,
        };
        results.push(row);
    }
    let report = PriceReport {
        config: &cfg,
        plan: (&plan).into(),
        budget: (&budget).into(),
        results,
    };
    let text = pick(cfg.output.format, &report, || {
        let mut csv = Csv::new(&cfg);
        let mut cols = vec!["strike", "price", "residue", "error", "method"];
        if check {
            cols.extend(["check_price", "check_delta", "check_passed"]);
        }
        cols.push("failure");
        csv.header(&cols);
        for r in &report.results {
            let mut cells = vec![sig10(r.strike), cell(r.price), cell(r.residue), cell(r.error), r.method.into()];
            if check {
                let c = r.check.as_ref();
                cells.push(cell(c.map(|c| c.price)));
                cells.push(cell(c.map(|c| c.delta)));
                cells.push(c.map(|c| c.passed.to_string()).unwrap_or_default());
            }
            cells.push(r.failure.as_deref().map(csv_quote).unwrap_or_default());
            csv.row(&cells);
        }
        csv.finish()
    });
    Ok(Output { text, failure })
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

#[derive(Serialize)]
struct DensityReport<'a> {
    config: &'a RunConfig,
    method: &'static str,
    plan: PlanOut,
    budget: BudgetOut,
    y: &'a [f64],
    p: &'a [f64],
    err: &'a [f64],
    negative_points: Vec<f64>,
}

/// Density of the log-return over `τ = T` on an even grid.
pub fn density(mut cfg: RunConfig, model: Model) -> Result<Output> {
    let (plan, budget) = plan_for(&mut cfg, &model)?;
    let n = &cfg.numerics;
    let tau = cfg.market.t;
    let step = if n.y_points > 1 {
        (n.y_max - n.y_min) / (n.y_points - 1) as f64
    } else {
        0.0
    };
    let ys: Vec<f64> = (0..n.y_points).map(|i| n.y_min + step * i as f64).collect();
    let method = match n.density {
        DensityChoice::Approximant => DensityMethod::Approximant,
        DensityChoice::Contour => DensityMethod::Contour,
        DensityChoice::Quadrature => DensityMethod::Quadrature,
    };
    let contour = contour_for(&cfg, plan.alpha_plus)?;
    let values: Vec<(f64, f64)> = ys
        .par_iter()
        .map(|&y| -> Result<(f64, f64)> {
            Ok(match n.density {
                DensityChoice::Approximant => {
                    (density_approximant(&model, &contour, tau, y, &plan)?, budget.eps_total)
                }
                DensityChoice::Contour => {
                    let d = density_contour(&model, &contour, tau, y, n.a, n.oracle_tol)?;
                    (d.value, d.error)
                }
                DensityChoice::Quadrature => {
                    let d = density_quadrature(&model, tau, y, plan.alpha_plus, n.a, n.oracle_tol)?;
                    (d.value, d.error + d.tail)
                }
            })
        })
        .collect::<Result<_>>()?;
    let mut curve = DensityCurve::new(method);
    for (y, (p, e)) in ys.iter().zip(values) {
        curve.push(*y, p, e);
    }
    let report = DensityReport {
        config: &cfg,
        method: method.name(),
        plan: (&plan).into(),
        budget: (&budget).into(),
        y: &curve.y,
        p: &curve.p,
        err: &curve.err,
        negative_points: curve.negative_points(),
    };
    let text = pick(cfg.output.format, &report, || {
        let mut csv = Csv::new(&cfg);
        csv.comment(&format!("method: {}", method.name()));
        csv.header(&["y", "p", "err"]);
        for i in 0..curve.len() {
            csv.row(&[sig10(curve.y[i]), sig10(curve.p[i]), sig10(curve.err[i])]);
        }
        csv.finish()
    });
    Ok(Output { text, failure: None })
}

#[derive(Serialize)]
struct BudgetReport<'a> {
    config: &'a RunConfig,
    plan: PlanOut,
    budget: BudgetOut,
}

/// Sampling plan and error budget. With `target`, first picks the smallest
/// `A` whose tail takes at most half of `target` (bisection), then the `ε`
/// that spends the rest.
pub fn budget(mut cfg: RunConfig, model: Model, target: Option<f64>) -> Result<Output> {
    if let Some(target) = target {
        let (a, eps) = split_target(&mut cfg, &model, target)?;
        cfg.numerics.a = a;
        cfg.numerics.epsilon = eps;
    }
    let (plan, budget) = plan_for(&mut cfg, &model)?;
    let report = BudgetReport {
        config: &cfg,
        plan: (&plan).into(),
        budget: (&budget).into(),
    };
    let text = pick(cfg.output.format, &report, || {
        let mut csv = Csv::new(&cfg);
        csv.header(&[
            "epsilon", "A", "alpha_plus", "delta", "M", "sigma", "h", "N", "eps_interp", "eps_tail", "eps_total",
        ]);
        csv.row(&[
            sig10(plan.epsilon),
            sig10(plan.a),
            sig10(plan.alpha_plus),
            sig10(plan.delta),
            sig10(budget.m),
            sig10(plan.sigma),
            sig10(plan.h),
            plan.n.to_string(),
            sig10(budget.eps_interp),
            sig10(budget.eps_tail),
            sig10(budget.eps_total),
        ]);
        csv.finish()
    });
    Ok(Output { text, failure: None })
}

fn split_target(cfg: &mut RunConfig, model: &Model, target: f64) -> Result<(f64, f64)> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(CliError::Validation("--target must be positive".into()));
    }
    // resolves alpha_plus
    plan_for(cfg, model)?;
    let alpha = cfg.numerics.alpha_plus.value().expect("resolved");
    let t = cfg.market.t;
    let tail = |a: f64| tail_eps(model, t, a, alpha);
    let (mut lo, mut hi) = (1e-3f64, 1e5f64);
    if tail(hi)? > 0.5 * target {
        return Err(CliError::Numerical(format!("tail stays above {:e} up to A = {hi}", 0.5 * target)));
    }
    if tail(lo)? <= 0.5 * target {
        hi = lo;
    }
    while hi / lo > 1.0 + 1e-6 {
        let mid = (lo * hi).sqrt();
        if tail(mid)? <= 0.5 * target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let eps = std::f64::consts::PI * (target - tail(hi)?) / hi;
    Ok((hi, eps))
}

#[derive(Serialize)]
struct SigmaRow {
    epsilon: f64,
    sigma: f64,
    h: f64,
}

#[derive(Serialize)]
struct TailRow {
    a: f64,
    eps_star: f64,
}

#[derive(Serialize)]
struct TablesReport<'a> {
    config: &'a RunConfig,
    m: f64,
    sigma_table: Vec<SigmaRow>,
    tail_table: Vec<TailRow>,
}

/// `ε → (σ, h)` for `ε = 1e-3..1e-10` and `A → ε*` for `A = 10..130`.
pub fn tables(mut cfg: RunConfig, model: Model) -> Result<Output> {
    plan_for(&mut cfg, &model)?;
    let alpha = cfg.numerics.alpha_plus.value().expect("resolved");
    let delta = cfg.numerics.delta.value().expect("resolved");
    let t = cfg.market.t;
    let m = compute_m(&model, alpha, delta, t)?.m;
    let sigma_table = SIGMA_EPS
        .iter()
        .map(|&epsilon| {
            let (sigma, h) = sigma_for_eps(m, delta, epsilon)?;
            Ok(SigmaRow { epsilon, sigma, h })
        })
        .collect::<Result<Vec<_>>>()?;
    let tail_table = (1..=13)
        .map(|i| {
            let a = 10.0 * i as f64;
            Ok(TailRow {
                a,
                eps_star: tail_eps(&model, t, a, alpha)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = TablesReport {
        config: &cfg,
        m,
        sigma_table,
        tail_table,
    };
    let text = pick(cfg.output.format, &report, || {
        let mut csv = Csv::new(&cfg);
        csv.comment(&format!("M: {}", sig10(m)));
        csv.header(&["epsilon", "sigma", "h"]);
        for r in &report.sigma_table {
            csv.row(&[format!("{:.0e}", r.epsilon), sig10(r.sigma), sig10(r.h)]);
        }
        csv.blank();
        csv.header(&["A", "eps_star"]);
        for r in &report.tail_table {
            csv.row(&[format!("{}", r.a), sig10(r.eps_star)]);
        }
        csv.finish()
    });
    Ok(Output { text, failure: None })
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    config: &'a RunConfig,
    y: f64,
    tau: f64,
    radii: &'a [f64],
    right: &'a [f64],
    left: &'a [f64],
    right_verified: bool,
    left_verified: bool,
    right_guaranteed: bool,
    left_guaranteed: bool,
    threshold: f64,
    verdict: &'static str,
}

/// Arc integrals of the inversion contour; a non-verified verdict sets exit code 4.
pub fn verify(mut cfg: RunConfig, model: Model) -> Result<Output> {
    plan_for(&mut cfg, &model)?;
    let alpha = cfg.numerics.alpha_plus.value().expect("resolved");
    let contour = contour_for(&cfg, alpha)?;
    let (y, tau) = (cfg.numerics.arc_y, cfg.market.t);
    let rep = verify_arc_decay(&model, &contour, y, tau, &cfg.numerics.radii, &ArcDecayOptions::default())?;
    let verdict = if rep.verified() { "verified" } else { "unverified" };
    let report = VerifyReport {
        config: &cfg,
        y,
        tau,
        radii: &rep.radii,
        right: &rep.right,
        left: &rep.left,
        right_verified: rep.right_verified,
        left_verified: rep.left_verified,
        right_guaranteed: rep.right_guaranteed,
        left_guaranteed: rep.left_guaranteed,
        threshold: rep.threshold,
        verdict,
    };
    let text = pick(cfg.output.format, &report, || {
        let mut csv = Csv::new(&cfg);
        csv.comment(&format!(
            "verdict: {verdict} (right {}, left {}; guaranteed right {}, left {})",
            rep.right_verified, rep.left_verified, rep.right_guaranteed, rep.left_guaranteed
        ));
        csv.header(&["radius", "right", "left"]);
        for i in 0..rep.radii.len() {
            csv.row(&[sig10(rep.radii[i]), sig10(rep.right[i]), sig10(rep.left[i])]);
        }
        csv.finish()
    });
    let failure = (!rep.verified()).then(|| CliError::CheckFailed(format!("arc decay {verdict} at y = {y}")));
    Ok(Output { text, failure })
}
