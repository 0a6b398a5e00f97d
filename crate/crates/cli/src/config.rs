//! TOML configuration files. Every value a flag can set has a counterpart
//! here; flags override file values. Figure recipes under `recipes/` are
//! such files.

use std::path::Path;

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub dynamics: DynamicsSection,
    #[serde(default)]
    pub robustness: RobustnessSection,
    #[serde(default)]
    pub simulate: SimulateSection,
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub n: Option<u32>,
    pub b: Option<f64>,
    pub cf: Option<f64>,
    pub cl: Option<f64>,
    pub p: Option<f64>,
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub tolerance: Option<f64>,
    pub max_iterations: Option<u32>,
    pub bracket_floor: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// One of "n", "cf", "cl", "p".
    pub axis: Option<String>,
    /// Explicit axis values; alternative to start/stop/step.
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub step: Option<f64>,
    /// Subset of {"q_star", "outage", "reward"}.
    pub outputs: Option<Vec<String>>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSection {
    pub mu: Option<f64>,
    pub q0: Option<Vec<f64>>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustnessSection {
    /// "coalition" or "barrier".
    pub mode: Option<String>,
    pub qm_step: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    /// "equilibrium", "all-upload", "all-abstain", a single probability, or
    /// a comma-separated per-player list.
    pub strategy: Option<String>,
    pub rounds: Option<u64>,
    pub seed: Option<u64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Input(format!("cannot read config {}: {e}", path.display()))
        })?;
        toml::from_str(&text)
            .map_err(|e| CliError::Input(format!("bad config {}: {e}", path.display())))
    }
}
