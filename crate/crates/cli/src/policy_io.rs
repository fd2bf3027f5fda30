//! Policy artifact: a JSON file pairing θ with the observation layout it was trained on.

use std::path::Path;

use glasshouse_core::{ObservationConfig, PolicyParams};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyArtifact {
    pub schema_version: u32,
    /// Hex FNV-1a fingerprint of the observation layout.
    pub obs_fingerprint: String,
    pub obs_len: usize,
    pub center: Vec<f64>,
    pub scale: Vec<f64>,
    pub theta: Vec<f64>,
}

pub fn fingerprint_hex(config: &ObservationConfig) -> String {
    format!("{:016x}", config.fingerprint())
}

impl PolicyArtifact {
    pub fn new(params: &PolicyParams, config: &ObservationConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            obs_fingerprint: fingerprint_hex(config),
            obs_len: params.obs_len(),
            center: params.center().to_vec(),
            scale: params.scale().to_vec(),
            theta: params.theta().to_vec(),
        }
    }

    /// Checks the artifact against the environment's layout and rebuilds the policy.
    pub fn into_params(self, config: &ObservationConfig) -> Result<PolicyParams> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Invalid(format!(
                "policy schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let expected = fingerprint_hex(config);
        if self.obs_fingerprint != expected {
            return Err(Error::Fingerprint {
                expected,
                found: self.obs_fingerprint,
            });
        }
        if self.obs_len != config.len() {
            return Err(Error::Invalid(format!(
                "policy obs_len {} does not match the environment's {}",
                self.obs_len,
                config.len()
            )));
        }
        Ok(PolicyParams::new(self.theta, self.center, self.scale)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

pub fn save_policy(path: &Path, params: &PolicyParams, config: &ObservationConfig) -> Result<()> {
    let text = PolicyArtifact::new(params, config).to_json()?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_policy(path: &Path, config: &ObservationConfig) -> Result<PolicyParams> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let artifact: PolicyArtifact =
        serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    artifact.into_params(config)
}
