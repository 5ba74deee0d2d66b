//! Resolved run configuration: built-in defaults, then a JSON config file,
//! then command-line flags.

use std::path::Path;

use clutter_core::congestion::FcConfig;
use clutter_core::foveation::FoveationConfig;
use clutter_core::models::{DenseModel, EdgeThresholds, ModelKind, SubbandConfig};
use clutter_core::stats::DEFAULT_BOOTSTRAP_B;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const DEFAULT_DEG_PER_PX: f64 = 0.044;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub deg_per_px: f64,
    pub seed: u64,
    pub bootstrap_b: usize,
    pub model: ModelKind,
    pub roi_sides_deg: Vec<f64>,
    pub fc: FcConfig,
    pub foveation: FoveationConfig,
    pub edge: EdgeThresholds,
    pub subband: SubbandConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            deg_per_px: DEFAULT_DEG_PER_PX,
            seed: 0,
            bootstrap_b: DEFAULT_BOOTSTRAP_B,
            model: ModelKind::Fc,
            roi_sides_deg: vec![4.0, 6.0, 8.0, 10.0, 12.0],
            fc: FcConfig::default(),
            foveation: FoveationConfig::default(),
            edge: EdgeThresholds::default(),
            subband: SubbandConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.deg_per_px.is_finite() && self.deg_per_px > 0.0) {
            return Err(CliError::Usage(format!(
                "deg_per_px must be positive, got {}",
                self.deg_per_px
            )));
        }
        if self.roi_sides_deg.is_empty() || self.roi_sides_deg.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(CliError::Usage("roi_sides_deg must be non-empty and positive".into()));
        }
        self.fc.validate()?;
        self.foveation.validate()?;
        self.edge.validate()?;
        self.subband.validate()?;
        Ok(())
    }

    pub fn dense_model(&self) -> DenseModel {
        match self.model {
            ModelKind::Fc => DenseModel::FeatureCongestion(self.fc.clone()),
            ModelKind::Ed => DenseModel::EdgeDensity(self.edge),
            ModelKind::Se => DenseModel::SubbandEnergy(self.subband.clone()),
        }
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}
