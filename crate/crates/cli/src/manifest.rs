use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Record of one CLI run, written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Every resolved setting, as written in config files.
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub artifacts: Vec<PathBuf>,
    pub tool_version: String,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> anyhow::Result<PathBuf> {
        let path = dir.join(format!("{}.manifest.json", self.subcommand));
        std::fs::write(&path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serializes_losslessly() {
        let m = RunManifest {
            subcommand: "sweep".into(),
            config: BTreeMap::from([("lr".into(), "0.002".into())]),
            seed: u64::MAX,
            artifacts: vec!["out/sweep.csv".into()],
            tool_version: "0.1.0".into(),
            duration_seconds: 0.1 + 0.2,
        };
        let back: RunManifest = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
