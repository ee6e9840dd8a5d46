use std::path::Path;

use aerosim_core::Scenario;
use anyhow::{Context, Result};
use serde::Serialize;

pub const FILE_NAME: &str = "manifest.json";

/// Everything needed to reproduce an output directory. Paths are relative
/// to the directory and there are no timestamps, so reruns give equal bytes.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub scenario: Scenario,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, scenario: &Scenario, outputs: Vec<String>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed: scenario.batch.seed,
            scenario: scenario.clone(),
            outputs,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(FILE_NAME);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}
