use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::RunConfig;

/// Provenance record printed alongside every artifact. Everything except
/// `elapsed_s` is a function of the resolved configuration and inputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub tool_version: String,
    pub seed: u64,
    /// SHA-256 of the command, resolved configuration and input files.
    pub input_hash: String,
    pub elapsed_s: f64,
    pub tolerances: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    pub config: RunConfig,
    pub result: serde_json::Value,
}
