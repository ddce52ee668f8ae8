#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use levy_pricer::config::{Auto, ContourChoice, DensityChoice};
use levy_pricer::{commands, CliError, Format, Output, RunConfig};

/// European call pricing under exponential-Lévy models.
#[derive(Parser)]
#[command(name = "levy-pricer", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Series prices over the strike grid
    Price {
        #[command(flatten)]
        common: Common,
        /// Cross-check every price against the quadrature reference
        #[arg(long)]
        check: bool,
    },
    /// Density of the log-return on a y grid
    Density {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        method: Option<DensityArg>,
        #[arg(long, allow_negative_numbers = true)]
        y_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        y_max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Sampling plan and composite error budget
    Budget {
        #[command(flatten)]
        common: Common,
        /// Split this total error between truncation and sampling
        #[arg(long)]
        target: Option<f64>,
    },
    /// Step and truncation tables
    Tables {
        #[command(flatten)]
        common: Common,
    },
    /// Check that the closing arcs of the contour vanish
    Verify {
        #[command(flatten)]
        common: Common,
        /// Log-price at which the arcs are evaluated
        #[arg(long, allow_negative_numbers = true)]
        y: Option<f64>,
        /// Comma-separated ascending radii
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Strike(s); replaces the strikes in the config
    #[arg(long, value_delimiter = ',')]
    strike: Vec<f64>,
    /// Sampling accuracy ε
    #[arg(long)]
    epsilon: Option<f64>,
    /// Truncation radius A
    #[arg(long = "A")]
    a: Option<f64>,
    /// Damping offset, a number or "auto"
    #[arg(long)]
    alpha_plus: Option<String>,
    #[arg(long, value_enum)]
    contour: Option<ContourArg>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cross-check tolerance
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ContourArg {
    Flat,
    Parabola,
    Cosh,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum DensityArg {
    Approximant,
    Contour,
    Quadrature,
}

impl Common {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::load(&self.config)?;
        if !self.strike.is_empty() {
            cfg.market.strike = None;
            cfg.market.strikes = self.strike.clone();
        }
        let n = &mut cfg.numerics;
        if let Some(v) = self.epsilon {
            n.epsilon = v;
        }
        if let Some(v) = self.a {
            n.a = v;
        }
        if let Some(v) = &self.alpha_plus {
            n.alpha_plus = match v.as_str() {
                "auto" => Auto::Auto,
                s => Auto::Value(
                    s.parse()
                        .map_err(|_| CliError::Validation(format!("--alpha-plus: expected a number or auto, got {s}")))?,
                ),
            };
        }
        if let Some(c) = self.contour {
            n.contour = match c {
                ContourArg::Flat => ContourChoice::Flat,
                ContourArg::Parabola => ContourChoice::Parabola,
                ContourArg::Cosh => ContourChoice::Cosh,
            };
        }
        if let Some(v) = self.tol {
            n.tol = v;
        }
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        if let Some(p) = &self.out {
            cfg.output.path = Some(p.display().to_string());
        }
        Ok(cfg)
    }
}

fn dispatch(cli: Cli) -> Result<(Output, Option<String>), CliError> {
    let common = match &cli.command {
        Command::Price { common, .. }
        | Command::Density { common, .. }
        | Command::Budget { common, .. }
        | Command::Tables { common }
        | Command::Verify { common, .. } => common,
    };
    let mut cfg = common.load()?;
    match &cli.command {
        Command::Density {
            method,
            y_min,
            y_max,
            points,
            ..
        } => {
            let n = &mut cfg.numerics;
            if let Some(m) = method {
                n.density = match m {
                    DensityArg::Approximant => DensityChoice::Approximant,
                    DensityArg::Contour => DensityChoice::Contour,
                    DensityArg::Quadrature => DensityChoice::Quadrature,
                };
            }
            n.y_min = y_min.unwrap_or(n.y_min);
            n.y_max = y_max.unwrap_or(n.y_max);
            n.y_points = points.unwrap_or(n.y_points);
        }
        Command::Verify { y, radii, .. } => {
            if let Some(y) = y {
                cfg.numerics.arc_y = *y;
            }
            if let Some(r) = radii {
                cfg.numerics.radii = r.clone();
            }
        }
        _ => {}
    }
    let (cfg, model) = cfg.resolve()?;
    let path = cfg.output.path.clone();
    let out = match cli.command {
        Command::Price { check, .. } => commands::price(cfg, model, check)?,
        Command::Density { .. } => commands::density(cfg, model)?,
        Command::Budget { target, .. } => commands::budget(cfg, model, target)?,
        Command::Tables { .. } => commands::tables(cfg, model)?,
        Command::Verify { .. } => commands::verify(cfg, model)?,
    };
    Ok((out, path))
}

fn init_threads() -> anyhow::Result<()> {
    let n = match std::env::var("LEVY_PRICER_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Validation(format!("LEVY_PRICER_THREADS must be a count, got {v:?}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("starting the worker pool")?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<Option<CliError>> {
    init_threads()?;
    let (out, path) = dispatch(cli)?;
    match path {
        Some(p) => std::fs::write(&p, &out.text).with_context(|| format!("writing {p}"))?,
        None => std::io::stdout()
            .write_all(out.text.as_bytes())
            .context("writing to stdout")?,
    }
    Ok(out.failure)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<CliError>().map_or(3, CliError::exit_code);
            ExitCode::from(code)
        }
    }
}
