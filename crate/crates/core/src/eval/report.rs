use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::BenchmarkResult;
use crate::error::{Error, Result};

/// Published accuracies of another method, keyed by dataset name.
///
/// Accepts either `{"name": "...", "accuracies": {...}}` or a bare map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "ReferenceRepr")]
pub struct ReferenceAccuracies {
    pub name: String,
    pub accuracies: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ReferenceRepr {
    Named {
        name: String,
        accuracies: BTreeMap<String, f64>,
    },
    Bare(BTreeMap<String, f64>),
}

impl From<ReferenceRepr> for ReferenceAccuracies {
    fn from(r: ReferenceRepr) -> Self {
        match r {
            ReferenceRepr::Named { name, accuracies } => Self { name, accuracies },
            ReferenceRepr::Bare(accuracies) => Self {
                name: "Reference".to_string(),
                accuracies,
            },
        }
    }
}

impl ReferenceAccuracies {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| match source.kind() {
            std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
            _ => Error::Io {
                path: path.to_path_buf(),
                source,
            },
        })?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// One dataset's outcome: a result, or the error that prevented it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkEntry {
    pub dataset: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub result: Option<BenchmarkResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reference_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BenchmarkReport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reference_name: Option<String>,
    pub entries: Vec<BenchmarkEntry>,
}

impl BenchmarkReport {
    pub fn new(reference: Option<&ReferenceAccuracies>) -> Self {
        Self {
            reference_name: reference.map(|r| r.name.clone()),
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, dataset: &str, outcome: std::result::Result<BenchmarkResult, String>, reference: Option<&ReferenceAccuracies>) {
        let (result, error) = match outcome {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e)),
        };
        self.entries.push(BenchmarkEntry {
            dataset: dataset.to_string(),
            result,
            error,
            reference_accuracy: reference.and_then(|r| r.accuracies.get(dataset).copied()),
        });
    }

    pub fn n_failed(&self) -> usize {
        self.entries.iter().filter(|e| e.error.is_some()).count()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Fixed-width table: dataset, mean accuracy, standard deviation and,
    /// when a reference is loaded, its accuracy.
    pub fn to_table(&self) -> String {
        let width = self
            .entries
            .iter()
            .map(|e| e.dataset.len())
            .chain(Some("Dataset".len()))
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        let _ = write!(out, "{:<width$}  {:>8}  {:>7}", "Dataset", "Network", "Std");
        if let Some(name) = &self.reference_name {
            let _ = write!(out, "  {name:>8}");
        }
        out.push('\n');
        for e in &self.entries {
            let _ = write!(out, "{:<width$}  ", e.dataset);
            match (&e.result, &e.error) {
                (Some(r), _) => {
                    let _ = write!(out, "{:>8.4}  {:>7.4}", r.mean_accuracy, r.std_accuracy);
                }
                (None, Some(err)) => {
                    let _ = write!(out, "{:>8}  {:>7}", "failed", "-");
                    if self.reference_name.is_none() {
                        let _ = write!(out, "  ({err})");
                    }
                }
                (None, None) => {
                    let _ = write!(out, "{:>8}  {:>7}", "-", "-");
                }
            }
            if self.reference_name.is_some() {
                match e.reference_accuracy {
                    Some(a) => {
                        let _ = write!(out, "  {a:>8.4}");
                    }
                    None => {
                        let _ = write!(out, "  {:>8}", "-");
                    }
                }
                if let (None, Some(err)) = (&e.result, &e.error) {
                    let _ = write!(out, "  ({err})");
                }
            }
            out.push('\n');
        }
        out
    }
}
