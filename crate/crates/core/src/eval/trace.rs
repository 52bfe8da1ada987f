use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Accuracies after one mini-batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub batch_index: usize,
    pub minibatch_accuracy: f64,
    pub train_accuracy: f64,
    pub test_accuracy: Option<f64>,
}

pub const TRACE_HEADER: &str = "batch,minibatch_acc,train_acc,test_acc";

/// Single-writer, append-only log of [`TraceRecord`]s.
#[derive(Debug, Clone, Default)]
pub struct TraceRecorder {
    records: Vec<TraceRecord>,
}

impl TraceRecorder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, record: TraceRecord) -> Result<()> {
        if let Some(last) = self.records.last() {
            if record.batch_index <= last.batch_index {
                return Err(Error::NonMonotoneTrace {
                    last: last.batch_index,
                    got: record.batch_index,
                });
            }
        }
        let fractions = [record.minibatch_accuracy, record.train_accuracy]
            .into_iter()
            .chain(record.test_accuracy);
        for f in fractions {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::invalid(format!("accuracy {f} outside [0, 1]")));
            }
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * (self.records.len() + 1));
        out.push_str(TRACE_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = write!(
                out,
                "{},{},{},",
                r.batch_index, r.minibatch_accuracy, r.train_accuracy
            );
            if let Some(t) = r.test_accuracy {
                let _ = write!(out, "{t}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}
