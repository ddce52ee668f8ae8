//! TOML run configuration.
//!
//! ```toml
//! [model]
//! type = "kobol"
//! nu = 0.5
//! c_plus = 1.0
//! c_minus = 1.0
//! lambda_plus = 5.0
//! lambda_minus = -5.0
//! mu = "auto"
//!
//! [market]
//! s0 = 100.0
//! strikes = [90.0, 100.0, 110.0]
//! r = 0.1
//! t = 0.5
//! ```
//!
//! `[numerics]` and `[output]` are optional. Every key resolved from a default
//! is written back into the echoed configuration.

use std::fmt;
use std::path::Path;

use levy_pricer_core::{
    calibrate_drift, CharacteristicExponent, Complex64, ContourKind, GaussianParams, KoBoLParams, Result as CoreResult,
    Strip,
};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{CliError, Result};

/// A number or the literal string `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Auto<T> {
    #[default]
    Auto,
    Value(T),
}

impl<T: Copy> Auto<T> {
    pub fn value(self) -> Option<T> {
        match self {
            Auto::Auto => None,
            Auto::Value(v) => Some(v),
        }
    }
}

impl Serialize for Auto<f64> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Auto::Auto => s.serialize_str("auto"),
            Auto::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Auto<f64> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Auto<f64>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"auto\"")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Self::Value, E> {
                match v {
                    "auto" => Ok(Auto::Auto),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Self::Value, E> {
                Ok(Auto::Value(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Self::Value, E> {
                Ok(Auto::Value(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Self::Value, E> {
                Ok(Auto::Value(v as f64))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelConfig {
    Kobol {
        nu: f64,
        c_plus: f64,
        c_minus: f64,
        lambda_plus: f64,
        lambda_minus: f64,
        #[serde(default)]
        mu: Auto<f64>,
    },
    /// Brownian motion with variance rate `a` and drift `b`; `b = "auto"` is `r - a/2`.
    Gaussian {
        a: f64,
        #[serde(default)]
        b: Auto<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketConfig {
    pub s0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strike: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub strikes: Vec<f64>,
    pub r: f64,
    pub t: f64,
}

impl MarketConfig {
    pub fn strike_list(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.strike.into_iter().collect();
        out.extend(&self.strikes);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContourChoice {
    Flat,
    Parabola,
    Cosh,
}

impl From<ContourChoice> for ContourKind {
    fn from(c: ContourChoice) -> Self {
        match c {
            ContourChoice::Flat => ContourKind::Flat,
            ContourChoice::Parabola => ContourKind::Parabola,
            ContourChoice::Cosh => ContourKind::Cosh,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityChoice {
    Approximant,
    Contour,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsConfig {
    #[serde(default = "defaults::contour")]
    pub contour: ContourChoice,
    #[serde(default)]
    pub alpha_plus: Auto<f64>,
    /// Strip half-width; `"auto"` reaches the upper edge of the strip.
    #[serde(default)]
    pub delta: Auto<f64>,
    #[serde(default = "defaults::epsilon")]
    pub epsilon: f64,
    #[serde(default = "defaults::a")]
    pub a: f64,
    /// Largest accepted |series - quadrature| price gap for `--check`.
    #[serde(default = "defaults::tol")]
    pub tol: f64,
    /// Truncation and tolerance of the quadrature reference.
    #[serde(default = "defaults::oracle_a")]
    pub oracle_a: f64,
    #[serde(default = "defaults::oracle_tol")]
    pub oracle_tol: f64,
    #[serde(default = "defaults::density")]
    pub density: DensityChoice,
    #[serde(default = "defaults::y_min")]
    pub y_min: f64,
    #[serde(default = "defaults::y_max")]
    pub y_max: f64,
    #[serde(default = "defaults::y_points")]
    pub y_points: usize,
    #[serde(default = "defaults::arc_y")]
    pub arc_y: f64,
    #[serde(default = "defaults::radii")]
    pub radii: Vec<f64>,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        toml::from_str("").expect("numerics defaults")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "defaults::format")]
    pub format: Format,
    /// File to write; stdout when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            format: Format::Json,
            path: None,
        }
    }
}

mod defaults {
    use super::*;

    pub fn contour() -> ContourChoice {
        ContourChoice::Flat
    }
    pub fn epsilon() -> f64 {
        1e-7
    }
    pub fn a() -> f64 {
        50.0
    }
    pub fn tol() -> f64 {
        5e-3
    }
    pub fn oracle_a() -> f64 {
        400.0
    }
    pub fn oracle_tol() -> f64 {
        1e-8
    }
    pub fn density() -> DensityChoice {
        DensityChoice::Approximant
    }
    pub fn y_min() -> f64 {
        -3.0
    }
    pub fn y_max() -> f64 {
        3.0
    }
    pub fn y_points() -> usize {
        61
    }
    pub fn arc_y() -> f64 {
        0.5
    }
    pub fn radii() -> Vec<f64> {
        vec![10.0, 20.0, 40.0, 80.0]
    }
    pub fn format() -> Format {
        Format::Json
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub market: MarketConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config {
            path: origin.to_string(),
            message: e.to_string().trim_end().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml(&text, &path.display().to_string())
    }

    /// Replaces every `"auto"` with the value it resolves to and checks the
    /// cross-field rules. The returned config is what outputs echo.
    pub fn resolve(mut self) -> Result<(Self, Model)> {
        let m = &self.market;
        for (name, v) in [("s0", m.s0), ("t", m.t)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Validation(format!("market.{name} must be positive")));
            }
        }
        if !(m.r >= 0.0 && m.r.is_finite()) {
            return Err(CliError::Validation("market.r must be nonnegative".into()));
        }
        if m.strike_list().iter().any(|k| !(*k > 0.0 && k.is_finite())) {
            return Err(CliError::Validation("strikes must be positive".into()));
        }
        let r = m.r;
        let model = match &mut self.model {
            ModelConfig::Kobol {
                nu,
                c_plus,
                c_minus,
                lambda_plus,
                lambda_minus,
                mu,
            } => {
                let base = KoBoLParams::new(*nu, *c_plus, *c_minus, *lambda_plus, *lambda_minus, 0.0)?;
                let drift = match mu.value() {
                    Some(v) => v,
                    None => calibrate_drift(&base, r)?,
                };
                *mu = Auto::Value(drift);
                Model::Kobol(base.with_mu(drift))
            }
            ModelConfig::Gaussian { a, b } => {
                let drift = b.value().unwrap_or(r - 0.5 * *a);
                *b = Auto::Value(drift);
                Model::Gaussian(GaussianParams::new(*a, drift)?)
            }
        };
        let n = &self.numerics;
        if !(n.epsilon > 0.0 && n.a > 0.0 && n.tol > 0.0 && n.oracle_a > 0.0 && n.oracle_tol > 0.0) {
            return Err(CliError::Validation(
                "numerics.epsilon, a, tol, oracle_a and oracle_tol must be positive".into(),
            ));
        }
        if n.y_points == 0 || !(n.y_min <= n.y_max) {
            return Err(CliError::Validation("density grid needs y_min <= y_max and y_points > 0".into()));
        }
        Ok((self, model))
    }
}

/// The exponent selected by the `[model]` section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    Kobol(KoBoLParams),
    Gaussian(GaussianParams),
}

impl CharacteristicExponent for Model {
    fn psi(&self, xi: Complex64) -> CoreResult<Complex64> {
        match self {
            Model::Kobol(p) => p.psi(xi),
            Model::Gaussian(p) => p.psi(xi),
        }
    }

    fn strip(&self) -> Strip {
        match self {
            Model::Kobol(p) => p.strip(),
            Model::Gaussian(p) => p.strip(),
        }
    }

    fn arc_decay_guarantee(&self, y: f64) -> (bool, bool) {
        match self {
            Model::Kobol(p) => p.arc_decay_guarantee(y),
            Model::Gaussian(p) => p.arc_decay_guarantee(y),
        }
    }
}
