use std::collections::BTreeMap;
use std::path::Path;

use segangle_core::sampling::Histogram;
use segangle_core::validation::ComparisonReport;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub const TOOL_VERSION: &str = concat!("segangle ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub name: String,
    pub value: f64,
    pub std_error: Option<f64>,
}

/// A binned sample next to the analytic mass of each bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramComparison {
    pub histogram: Histogram,
    pub heights: Vec<f64>,
    pub empirical_bin_masses: Vec<f64>,
    pub analytic_bin_masses: Vec<f64>,
}

/// Everything needed to replay a run. Replaying `(subcommand, parameters, seed)`
/// reproduces every field except `wall_time_seconds` and any `wall-time-seconds/*`
/// comparison values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool_version: String,
    pub subcommand: String,
    pub seed: Option<u64>,
    pub generator_id: String,
    pub quadrature_rule: String,
    pub parameters: BTreeMap<String, Value>,
    pub estimates: Vec<Estimate>,
    pub comparisons: Vec<ComparisonReport>,
    /// Reported for context; not part of any pass/fail decision.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub informational: Vec<ComparisonReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditional_angles: Option<HistogramComparison>,
    pub wall_time_seconds: f64,
}

impl RunReport {
    pub fn new(subcommand: &str, seed: Option<u64>) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            subcommand: subcommand.to_string(),
            seed,
            generator_id: segangle_core::sampling::GENERATOR_ID.to_string(),
            quadrature_rule: segangle_core::quadrature::RULE_ID.to_string(),
            parameters: BTreeMap::new(),
            estimates: Vec::new(),
            comparisons: Vec::new(),
            informational: Vec::new(),
            conditional_angles: None,
            wall_time_seconds: 0.0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn estimate(&mut self, name: &str, value: f64, std_error: Option<f64>) -> &mut Self {
        self.estimates.push(Estimate { name: name.to_string(), value, std_error });
        self
    }

    pub fn failures(&self) -> usize {
        self.comparisons.iter().filter(|c| !c.pass).count()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// JSON with the wall time zeroed, for byte comparisons between replays.
    pub fn to_json_without_time(&self) -> String {
        let mut copy = self.clone();
        copy.wall_time_seconds = 0.0;
        copy.to_json()
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Path of the JSON report written next to a CSV output.
pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".report.json");
    name.into()
}
