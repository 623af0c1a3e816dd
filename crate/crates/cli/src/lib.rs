//! Reproducible experiment runner: JSON configs, dataset synthesis and
//! ingestion, the classifier-cost variance study, and CSV/manifest emission.

pub mod config;
pub mod dataset;
pub mod error;
pub mod qml;
pub mod run;

pub use config::{Command, ExperimentConfig, ExperimentKind};
pub use dataset::{synthesize_dataset, Dataset, DatasetSource};
pub use error::{CliError, Result};
pub use qml::{qml_cost_experiment, qml_problem, qml_unitary, QmlRow};
pub use run::{run, RunOutcome};
