//! JSON scenario documents.
//!
//! A document bundles the four configuration sections under fixed keys;
//! every field name matches the corresponding type definition.

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

use crate::attack::{AttackError, ReflectionSchedule};
use crate::crkg::{CprConfig, CprError};
use crate::probing::{ProbeConfig, ProbeError};
use crate::scene::{SceneError, Scenario};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error(transparent)]
    Cpr(#[from] CprError),
}

/// One complete simulation setup.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    pub scenario: Scenario,
    pub probe: ProbeConfig,
    pub schedule: ReflectionSchedule,
    /// Countermeasure parameters; defaults derived from the scenario
    /// when omitted.
    #[serde(default)]
    pub cpr: Option<CprConfig>,
}

impl SimConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let cfg: SimConfig = serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.display().to_string(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.scenario.validate()?;
        self.probe.validate()?;
        self.schedule.validate()?;
        if let Some(cpr) = &self.cpr {
            cpr.validate(self.scenario.k, self.probe.n_p)?;
        }
        Ok(())
    }

    /// The configured CPR parameters, or defaults sized to the scenario.
    pub fn cpr_config(&self) -> CprConfig {
        self.cpr
            .clone()
            .unwrap_or_else(|| CprConfig::defaults_for(self.scenario.l, self.probe.n_p))
    }
}
