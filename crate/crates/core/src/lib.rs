//! Mini-batch rule learning with a boolean AND/OR network.
//!
//! Data is one-hot encoded into literals ([`dataset`]), a network of
//! conjunctions feeding one disjunction is evaluated with bit-packed boolean
//! matrix products ([`boolnet`]), trained by greedy literal flips on
//! mini-batches followed by a greedy rule re-selection ([`trainer`]), and
//! scored by cross-validation ([`eval`]).

pub mod bits;
pub mod boolnet;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod model;
pub mod trainer;

pub use bits::{BitMatrix, BitVec};
pub use boolnet::{AndLayer, OrLayer, RuleNetwork};
pub use dataset::{prepare, Attribute, AttributeSchema, DatasetMetadata, EncodedDataset, PrepareOptions, RawTable};
pub use error::{Error, Result};
pub use eval::{cross_validate, remap_minority, BenchmarkResult, CvOptions, TraceRecord, TraceRecorder};
pub use model::Model;
pub use trainer::{fit, BatchSize, FitOutcome, TrainConfig, TrainReport};
