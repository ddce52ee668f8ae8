use serde::Serialize;

use crate::config::{Format, RunConfig};

/// Ten significant digits: plain notation for magnitudes in `[0.1, 1e10)`,
/// scientific otherwise (`6.626537364e-2`).
pub fn sig10(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.9e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-1..10).contains(&exp) {
        format!("{v:.*}", (9 - exp) as usize)
    } else {
        sci
    }
}

/// Comma-separated table with a `#`-prefixed preamble.
#[derive(Debug, Default)]
pub struct Csv {
    out: String,
}

impl Csv {
    pub fn new(config: &RunConfig) -> Self {
        let echo = serde_json::to_string(config).expect("config serializes");
        Self {
            out: format!("# config: {echo}\n"),
        }
    }

    pub fn comment(&mut self, text: &str) -> &mut Self {
        self.out.push_str("# ");
        self.out.push_str(text);
        self.out.push('\n');
        self
    }

    pub fn header(&mut self, cols: &[&str]) -> &mut Self {
        self.out.push_str(&cols.join(","));
        self.out.push('\n');
        self
    }

    pub fn row(&mut self, cells: &[String]) -> &mut Self {
        self.out.push_str(&cells.join(","));
        self.out.push('\n');
        self
    }

    pub fn blank(&mut self) -> &mut Self {
        self.out.push('\n');
        self
    }

    pub fn finish(self) -> String {
        self.out
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub fn cell(v: Option<f64>) -> String {
    v.map(sig10).unwrap_or_default()
}

pub fn pick<T: Serialize>(format: Format, report: &T, csv: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => json(report),
        Format::Csv => csv(),
    }
}
