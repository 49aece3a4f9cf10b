//! Experiment configuration files.

use std::path::{Path, PathBuf};

use cvtele::protocol::ProtocolConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

fn default_n_phases() -> usize {
    16
}

fn default_n_in() -> f64 {
    1.0
}

fn default_batches() -> usize {
    cvtele::tomography::DEFAULT_BATCHES
}

fn default_max_order() -> usize {
    4
}

fn default_threshold() -> f64 {
    cvtele::tomography::DEFAULT_THRESHOLD
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub protocol: Option<ProtocolConfig>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub fit: Option<FitSection>,
    #[serde(default)]
    pub qubit: Option<QubitSection>,
    #[serde(default)]
    pub tomography: Option<TomographySection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Input photon numbers for `sweep-photon`.
    #[serde(default)]
    pub n_in: Vec<f64>,
    #[serde(default = "default_n_phases")]
    pub n_phases: usize,
    /// Link centre temperatures for `sweep-temp`, kelvin.
    #[serde(default)]
    pub t_cen: Vec<f64>,
    /// Input photon number used by `sweep-temp`.
    #[serde(default = "default_n_in")]
    pub temperature_n_in: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    /// CSV with columns `n_in,fidelity` and optionally `sigma`, relative to
    /// the config file.
    pub data: PathBuf,
    /// Resource squeezing for the fixed-squeezing decomposition.
    #[serde(default)]
    pub s_tms_db: Option<f64>,
    /// Squeezing levels at which qubit fidelities are predicted.
    #[serde(default)]
    pub predict_s_db: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FittedPoint {
    pub t_cen: f64,
    pub kappa: f64,
    pub zeta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitSection {
    /// Squeezing at which the fits were taken.
    pub fitted_s_db: f64,
    pub target_s_db: Vec<f64>,
    pub fits: Vec<FittedPoint>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Vacuum { modes: usize },
    Coherent { re: f64, im: f64 },
    Thermal { n: f64 },
    Tms { s_db: f64 },
    /// The resource pair after all losses of the `protocol` section.
    Distributed,
    /// Bob's output for an input of `n_in` photons at phase `phase`.
    Teleported {
        n_in: f64,
        #[serde(default)]
        phase: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomographySection {
    pub state: StateSpec,
    pub n_samples: usize,
    #[serde(default = "default_batches")]
    pub n_batches: usize,
    #[serde(default = "default_max_order")]
    pub max_order: usize,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub write_samples: bool,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<(Self, PathBuf), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let config = serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((config, base))
    }

    pub fn protocol(&self) -> Result<&ProtocolConfig, CliError> {
        self.protocol.as_ref().ok_or(CliError::missing("protocol"))
    }

    pub fn sweep(&self) -> Result<&SweepSection, CliError> {
        self.sweep.as_ref().ok_or(CliError::missing("sweep"))
    }

    pub fn fit(&self) -> Result<&FitSection, CliError> {
        self.fit.as_ref().ok_or(CliError::missing("fit"))
    }

    pub fn qubit(&self) -> Result<&QubitSection, CliError> {
        self.qubit.as_ref().ok_or(CliError::missing("qubit"))
    }

    pub fn tomography(&self) -> Result<&TomographySection, CliError> {
        self.tomography.as_ref().ok_or(CliError::missing("tomography"))
    }
}
