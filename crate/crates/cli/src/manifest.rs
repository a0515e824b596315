use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use mmes::OptimizerConfig;
use serde::Serialize;

/// Bumped whenever a CSV column set or JSON layout changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Provenance written next to every output as `<output>.manifest.json`.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a, C: Serialize> {
    pub schema_version: u32,
    pub command: &'a str,
    pub version: &'static str,
    pub seed: u64,
    pub config: &'a C,
    /// Every optimizer setting in effect, defaults included.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerConfig>,
    pub wall_time_seconds: f64,
    pub outputs: Vec<PathBuf>,
}

impl<'a, C: Serialize> RunManifest<'a, C> {
    pub fn new(command: &'a str, seed: u64, config: &'a C) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config,
            optimizer: None,
            wall_time_seconds: 0.0,
            outputs: Vec::new(),
        }
    }

    /// Writes one manifest beside each recorded output.
    pub fn finish(mut self, elapsed: Duration) -> Result<()> {
        self.wall_time_seconds = elapsed.as_secs_f64();
        let text = serde_json::to_string_pretty(&self)?;
        for out in &self.outputs {
            let path = manifest_path(out);
            std::fs::write(&path, &text)
                .with_context(|| format!("writing manifest {}", path.display()))?;
        }
        Ok(())
    }
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(
            manifest_path(Path::new("runs/scan7.csv")),
            PathBuf::from("runs/scan7.csv.manifest.json")
        );
    }
}
