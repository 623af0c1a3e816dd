//! JSON experiment configs. The envelope names the experiment, the seed and
//! the output directory; `params` is decoded into the experiment's own schema.
//! Every struct rejects unknown keys.

use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use qvar::estimators::EstimatorKind;
use qvar::randmat::RemainderCost;

use crate::dataset::DatasetSource;
use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExperimentKind {
    QmlVariance,
    MlqaeScaling,
    SunRemainder,
    EstimatorSweep,
    GrapeConvergence,
}

impl ExperimentKind {
    pub fn label(self) -> &'static str {
        match self {
            ExperimentKind::QmlVariance => "QML_VARIANCE",
            ExperimentKind::MlqaeScaling => "MLQAE_SCALING",
            ExperimentKind::SunRemainder => "SUN_REMAINDER",
            ExperimentKind::EstimatorSweep => "ESTIMATOR_SWEEP",
            ExperimentKind::GrapeConvergence => "GRAPE_CONVERGENCE",
        }
    }
}

/// CLI subcommands and the experiment each one runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Estimate,
    Gradient,
    Remainder,
    Mlqae,
    Qml,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Estimate => "estimate",
            Command::Gradient => "gradient",
            Command::Remainder => "remainder",
            Command::Mlqae => "mlqae",
            Command::Qml => "qml",
        }
    }

    pub fn experiment(self) -> ExperimentKind {
        match self {
            Command::Estimate => ExperimentKind::EstimatorSweep,
            Command::Gradient => ExperimentKind::GrapeConvergence,
            Command::Remainder => ExperimentKind::SunRemainder,
            Command::Mlqae => ExperimentKind::MlqaeScaling,
            Command::Qml => ExperimentKind::QmlVariance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub params: serde_json::Value,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Decodes `params`, prefixing diagnostics with the field path.
    pub fn params<T: DeserializeOwned>(&self) -> Result<T> {
        serde_json::from_value(self.params.clone()).map_err(|e| CliError::Config(format!("params: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub source: DatasetSource,
    /// Required for `CSV`.
    #[serde(default)]
    pub path: Option<PathBuf>,
    /// Number of points to synthesize; defaults to the largest `L`.
    #[serde(default)]
    pub size: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QmlParams {
    pub n_qubits: usize,
    pub l_values: Vec<usize>,
    pub shots: usize,
    pub repetitions: usize,
    #[serde(default = "default_layers")]
    pub layers: usize,
    pub dataset: DatasetSpec,
}

fn default_layers() -> usize {
    2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StateSpec {
    Zero,
    RandomPure,
    RandomMixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    /// Pauli-sum text, one `coeff STRING` per line.
    pub observable: String,
    pub state: StateSpec,
    pub estimators: Vec<EstimatorKind>,
    pub shots: Vec<usize>,
    pub repetitions: usize,
    /// Unitary draws per SA-LCU run.
    #[serde(default = "default_sa_unitaries")]
    pub sa_unitaries: usize,
}

fn default_sa_unitaries() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlqaeParams {
    pub p: f64,
    pub levels: Vec<usize>,
    pub shots_per_level: u64,
    pub classical_queries: Vec<u64>,
    pub seeds: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemainderParams {
    pub n_qubits: usize,
    pub thetas: Vec<f64>,
    pub l_max: usize,
    pub n_draws: usize,
    #[serde(default = "one")]
    pub lambda_a: f64,
    #[serde(default = "one")]
    pub lambda_b: f64,
    pub costs: Vec<RemainderCost>,
    #[serde(default)]
    pub commuting: bool,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "SCREAMING_SNAKE_CASE", deny_unknown_fields)]
pub enum PulseSpec {
    Gaussian { amplitude: f64, center: f64, width: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrapeParams {
    /// Pauli-sum texts for the drift and each control.
    pub drift: String,
    pub controls: Vec<String>,
    pub pulses: Vec<PulseSpec>,
    pub observable: String,
    /// Computational-basis index of the initial state.
    #[serde(default)]
    pub initial_basis_state: usize,
    pub t0: f64,
    pub t_final: f64,
    pub grids: Vec<usize>,
    /// Slices of the exact-mode reference; defaults to 4× the finest grid.
    #[serde(default)]
    pub reference_slices: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_and_params_reject_unknown_keys() {
        let bad = ExperimentConfig::parse(r#"{"experiment":"QML_VARIANCE","params":{},"sed":1}"#).unwrap_err();
        assert!(bad.to_string().contains("sed"), "{bad}");
        assert_eq!(bad.exit_code(), 2);
        let cfg = ExperimentConfig::parse(r#"{"experiment":"SUN_REMAINDER","seed":3,"params":{"n_qubits":3,"thetas":[0.5],"l_max":2,"n_draws":2,"costs":["potq"],"extra":1}}"#).unwrap();
        let e = cfg.params::<RemainderParams>().unwrap_err().to_string();
        assert!(e.contains("params") && e.contains("extra"), "{e}");
    }

    #[test]
    fn missing_fields_are_named() {
        let cfg = ExperimentConfig::parse(r#"{"experiment":"MLQAE_SCALING","params":{"p":0.3}}"#).unwrap();
        let e = cfg.params::<MlqaeParams>().unwrap_err().to_string();
        assert!(e.contains("levels"), "{e}");
        assert!(ExperimentConfig::parse(r#"{"experiment":"NOPE","params":{}}"#).is_err());
    }

    #[test]
    fn commands_map_to_experiments() {
        assert_eq!(Command::Qml.experiment().label(), "QML_VARIANCE");
        assert_eq!(Command::Gradient.experiment(), ExperimentKind::GrapeConvergence);
    }
}
