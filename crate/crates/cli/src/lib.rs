//! Scenario runner behind the `qshhg` command: flat TOML configs, staged
//! pipeline execution, checksummed outputs and canned figure configs.

pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod pipeline;
mod plot;

pub use config::{OutputKind, ScenarioConfig};
pub use error::{CliError, Result};
pub use output::RunManifest;
pub use pipeline::{convergence_check, run_scenario, RunOptions};
