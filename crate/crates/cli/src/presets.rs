//! Experiment recipes shipped with the binary.

use anyhow::{anyhow, Result};

use crate::spec::ExperimentSpec;

pub const NAMES: [&str; 2] = ["fig1-small", "fig2"];

pub fn text(name: &str) -> Option<&'static str> {
    match name {
        "fig1-small" => Some(include_str!("../presets/fig1-small.toml")),
        "fig2" => Some(include_str!("../presets/fig2.toml")),
        _ => None,
    }
}

pub fn load(name: &str) -> Result<ExperimentSpec> {
    let text = text(name).ok_or_else(|| anyhow!("unknown preset '{name}' (available: {})", NAMES.join(", ")))?;
    ExperimentSpec::from_toml(text)
}
