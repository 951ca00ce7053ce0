//! Canned figure configs, one TOML per id, compiled into the binary.

use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};

macro_rules! figures {
    ($($id:literal),* $(,)?) => {
        pub const FIGURES: &[(&str, &str)] = &[
            $(($id, include_str!(concat!("../configs/figures/", $id, ".toml")))),*
        ];
    };
}

figures!(
    "fig1a", "fig1b", "fig1c", "fig1d", "fig2", "fig3", "fig4a", "fig4b", "fig4c", "fig4d", "fig5a", "fig5b", "fig5c", "fig5d",
    "s1", "s2", "s3", "s4", "s5",
);

pub fn figure_ids() -> Vec<&'static str> {
    FIGURES.iter().map(|(id, _)| *id).collect()
}

pub fn figure_source(id: &str) -> Result<&'static str> {
    FIGURES
        .iter()
        .find(|(k, _)| *k == id)
        .map(|(_, text)| *text)
        .ok_or_else(|| CliError::Usage(format!("unknown figure id `{id}`; valid ids: {}", figure_ids().join(", "))))
}

pub fn figure_config(id: &str) -> Result<ScenarioConfig> {
    ScenarioConfig::from_toml(figure_source(id)?)
}
