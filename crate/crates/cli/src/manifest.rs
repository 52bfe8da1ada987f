use std::path::{Path, PathBuf};

use anyhow::Result;
use serde::Deserialize;

use crate::UsageError;

/// A list of benchmark datasets:
///
/// ```toml
/// [[dataset]]
/// name = "adult"
/// path = "adult.csv"     # relative to the manifest
/// label = "income"
/// bins = 4
/// nominal = []
/// ```
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(rename = "dataset")]
    pub datasets: Vec<DatasetEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    pub name: String,
    pub path: PathBuf,
    pub label: Option<String>,
    pub bins: Option<usize>,
    #[serde(default)]
    pub nominal: Vec<String>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read manifest {}: {e}", path.display())))?;
        let mut manifest: Manifest = toml::from_str(&text)
            .map_err(|e| UsageError(format!("invalid manifest {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for d in &mut manifest.datasets {
            if d.path.is_relative() {
                d.path = base.join(&d.path);
            }
        }
        Ok(manifest)
    }
}
