//! Run configuration read from JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use crate::dynamics::IntegratorConfig;
use crate::media::{ProfileSpec, RefractiveProfile};
use crate::tensor::{Components, Vec3};

#[derive(Debug, ThisError)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed configuration: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub x: Vec3,
    pub v: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub format: OutputFormat,
    /// Trajectory file; `trajectory.csv` / `trajectory.json` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Overrides `integrator.sample_every`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub every: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub profile: ProfileSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialState>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |e: crate::Error| ConfigError::Invalid(e.to_string());
        RefractiveProfile::from_spec(&self.profile).map_err(invalid)?;
        self.integrator.validate().map_err(invalid)?;
        if let Some(init) = &self.initial {
            if !(init.x.all_finite() && init.v.all_finite()) {
                return Err(ConfigError::Invalid("initial state must be finite".into()));
            }
        }
        if let Some(every) = self.output.every {
            if !(every.is_finite() && every > 0.0) {
                return Err(ConfigError::Invalid(format!(
                    "output.every must be positive, got {every}"
                )));
            }
        }
        Ok(())
    }

    pub fn profile(&self) -> RefractiveProfile {
        RefractiveProfile::from_spec(&self.profile).expect("validated profile")
    }

    /// Integrator settings with the output sampling override applied.
    pub fn effective_integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            sample_every: self.output.every.unwrap_or(self.integrator.sample_every),
            ..self.integrator
        }
    }

    pub fn output_path(&self) -> PathBuf {
        self.output
            .path
            .clone()
            .unwrap_or_else(|| match self.output.format {
                OutputFormat::Csv => PathBuf::from("trajectory.csv"),
                OutputFormat::Json => PathBuf::from("trajectory.json"),
            })
    }
}
