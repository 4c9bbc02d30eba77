use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{parse_json, read_text, SimulateConfig};
use crate::error::{CliError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Record of one `simulate` run. Re-running `simulate --config manifest.json` reproduces
/// the outputs byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub config_path: Option<String>,
    /// Configuration after `--seed` and checkpoint defaults were applied.
    pub config: SimulateConfig,
    pub master_seed: u64,
    /// Informational; results do not depend on it.
    pub workers: Option<usize>,
    /// Output file names, relative to the manifest's directory.
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        parse_json(path, &read_text(path)?)
    }

    pub fn output(&self, dir: &Path, suffix: &str) -> Option<std::path::PathBuf> {
        self.outputs
            .iter()
            .find(|o| o.ends_with(suffix))
            .map(|o| dir.join(o))
    }
}

/// Reads a simulate configuration, accepting a [`RunManifest`] in its place.
pub fn load_simulate_input(path: &Path) -> Result<SimulateConfig> {
    let text = read_text(path)?;
    let value: serde_json::Value = parse_json(path, &text)?;
    if value.get("tool_version").is_some() {
        let m: RunManifest = parse_json(path, &text)?;
        m.config
            .experiment
            .validate()
            .map_err(|e| CliError::config(path, e))?;
        Ok(m.config)
    } else {
        SimulateConfig::parse(path, &text)
    }
}
