//! Versioned JSON configuration files.

use std::path::Path;

use pq_slln::criteria::{ClauseTable, CriteriaOptions};
use pq_slln::mc_engine::ExperimentConfig;
use pq_slln::tail_models::ModelRef;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Input of `pq-slln criteria`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriteriaConfig {
    pub schema: u32,
    pub model: ModelRef,
    pub p: f64,
    pub q: f64,
    /// Clause table; defaults to the almost-sure one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<ClauseTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<CriteriaOptions>,
}

/// Input of `pq-slln simulate`: an experiment plus the schema tag.
///
/// Deserialized by hand because `#[serde(flatten)]` would silently accept unknown keys.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateConfig {
    pub schema: u32,
    #[serde(flatten)]
    pub experiment: ExperimentConfig,
}

impl<'de> Deserialize<'de> for SimulateConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let mut map = serde_json::Map::<String, serde_json::Value>::deserialize(d)?;
        let schema = map
            .remove("schema")
            .ok_or_else(|| D::Error::missing_field("schema"))?;
        let schema = u32::deserialize(schema).map_err(D::Error::custom)?;
        let experiment =
            ExperimentConfig::deserialize(serde_json::Value::Object(map)).map_err(D::Error::custom)?;
        Ok(Self { schema, experiment })
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))
}

/// Parses JSON, reporting syntax and type errors with line and column.
pub fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        if e.line() == 0 {
            // Errors raised after the syntax pass carry no position.
            CliError::config(path, e)
        } else {
            CliError::Parse {
                path: path.display().to_string(),
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            }
        }
    })
}

fn check_schema(path: &Path, schema: u32) -> Result<()> {
    if schema == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(CliError::config(
            path,
            format!("unsupported schema {schema}, expected {SCHEMA_VERSION}"),
        ))
    }
}

impl CriteriaConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = parse_json(path, &read_text(path)?)?;
        check_schema(path, cfg.schema)?;
        if !(cfg.p > 0.0 && cfg.q > 0.0 && cfg.p.is_finite() && cfg.q.is_finite()) {
            return Err(CliError::config(path, "p and q must be positive"));
        }
        Ok(cfg)
    }
}

impl SimulateConfig {
    pub fn parse(path: &Path, text: &str) -> Result<Self> {
        let cfg: Self = parse_json(path, text)?;
        check_schema(path, cfg.schema)?;
        cfg.experiment.validate().map_err(|e| CliError::config(path, e))?;
        Ok(cfg)
    }
}
