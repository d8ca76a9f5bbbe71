//! CSV, JSON and manifest serialization.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::chain::{EnsembleStats, Scenario};
use crate::sampling::RNG_ALGORITHM;

pub const SCHEMA_VERSION: &str = "1";
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const STATS_COLUMNS: &str = "t,positional_correct,positional_stderr,cumulative_correct";

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Key columns that identify which curve or grid cell a row belongs to.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RowKey {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub principal: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_bias: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_trust: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    #[serde(flatten)]
    pub key: RowKey,
    pub t: usize,
    pub positional_correct: f64,
    pub positional_stderr: f64,
    pub cumulative_correct: f64,
}

/// Which key columns a table carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// One ensemble, no key columns.
    Single,
    /// `p_bias,p_trust` keys.
    Grid,
    /// `curve,principal,p_bias,p_trust` keys.
    Curves,
}

pub fn rows(key: &RowKey, stats: &EnsembleStats) -> Vec<Row> {
    (0..stats.horizon)
        .map(|i| Row {
            key: key.clone(),
            t: i + 1,
            positional_correct: stats.positional_correct[i],
            positional_stderr: stats.positional_stderr[i],
            cumulative_correct: stats.cumulative_correct[i],
        })
        .collect()
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn to_csv(layout: Layout, rows: &[Row]) -> String {
    let mut out = String::new();
    match layout {
        Layout::Single => {}
        Layout::Grid => out.push_str("p_bias,p_trust,"),
        Layout::Curves => out.push_str("curve,principal,p_bias,p_trust,"),
    }
    out.push_str(STATS_COLUMNS);
    out.push('\n');
    for row in rows {
        match layout {
            Layout::Single => {}
            Layout::Grid => {
                let _ = write!(out, "{},{},", opt(row.key.p_bias), opt(row.key.p_trust));
            }
            Layout::Curves => {
                let principal = match row.key.principal {
                    Some(true) => "on",
                    _ => "off",
                };
                let _ = write!(
                    out,
                    "{},{},{},{},",
                    row.key.curve.as_deref().unwrap_or(""),
                    principal,
                    opt(row.key.p_bias),
                    opt(row.key.p_trust)
                );
            }
        }
        let _ = writeln!(
            out,
            "{},{},{},{}",
            row.t,
            fmt_num(row.positional_correct),
            fmt_num(row.positional_stderr),
            fmt_num(row.cumulative_correct)
        );
    }
    out
}

pub fn to_json(rows: &[Row]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}

/// A p-bias x p-trust grid echoed in sweep manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridEcho {
    pub p_bias: Vec<f64>,
    pub p_trust: Vec<f64>,
}

/// Provenance written next to every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: String,
    pub timestamp: String,
    pub master_seed: u64,
    pub rng_algorithm: String,
    pub scenario: Scenario,
    pub artifact_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridEcho>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub narrated: bool,
}

impl RunManifest {
    pub fn new(scenario: &Scenario) -> Self {
        RunManifest {
            schema_version: SCHEMA_VERSION.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            master_seed: scenario.master_seed,
            rng_algorithm: RNG_ALGORITHM.to_string(),
            scenario: *scenario,
            artifact_version: ARTIFACT_VERSION.to_string(),
            grid: None,
            preset: None,
            curve: None,
            narrated: false,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed manifest: {e}")))
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
