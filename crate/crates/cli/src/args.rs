use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rulenet_core::dataset::{IngestOptions, PrepareOptions};
use rulenet_core::trainer::{BatchSize, TrainConfig};

use crate::UsageError;

/// Learn DNF rule sets with a boolean AND/OR network.
#[derive(Debug, Parser)]
#[command(name = "rulenet", version)]
pub struct Cli {
    /// Log more (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a network on a CSV file and save the model.
    Train(TrainArgs),
    /// Predict class names for the rows of a CSV file.
    Predict(PredictArgs),
    /// Cross-validate on one or more datasets.
    Benchmark(BenchmarkArgs),
    /// Record per-batch accuracies on a seeded train/holdout split.
    Trace(TraceArgs),
    /// Print a saved model as a readable rule list.
    ExportDnf(ExportArgs),
}

/// How to read and encode a CSV file.
#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Label column. Defaults to the last column.
    #[arg(long)]
    pub label: Option<String>,

    /// Bin numeric columns into this many equal-frequency bins (4 if given
    /// without a value). Without it numeric columns are rejected.
    #[arg(long, num_args = 0..=1, default_missing_value = "4", value_name = "N")]
    pub bins: Option<usize>,

    /// Columns to keep nominal even if all values are numbers.
    #[arg(long, value_delimiter = ',', value_name = "COLUMNS")]
    pub nominal: Vec<String>,

    /// Cell value meaning "unknown".
    #[arg(long, default_value = "?")]
    pub missing_token: String,
}

impl DataArgs {
    pub fn ingest(&self) -> IngestOptions {
        IngestOptions {
            missing_token: self.missing_token.clone(),
            ..IngestOptions::default()
        }
    }

    pub fn prepare(&self) -> Result<PrepareOptions> {
        if self.bins.is_some_and(|b| b < 2) {
            return Err(UsageError("--bins must be at least 2".into()).into());
        }
        Ok(PrepareOptions {
            n_bins: self.bins,
            nominal: self.nominal.clone(),
        })
    }
}

/// Training hyperparameters. Unset flags fall back to the config file, then
/// to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// TOML file with training settings.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Number of rules (AND-layer columns) [default: 20].
    #[arg(long)]
    pub rules: Option<usize>,

    /// Mini-batch size, a count or `auto` for round(sqrt(n)) [default: auto].
    #[arg(long)]
    pub batch_size: Option<BatchSize>,

    /// Maximum flips per mini-batch [default: 2].
    #[arg(long)]
    pub max_flips: Option<usize>,

    /// Expected literals per initial rule [default: 3].
    #[arg(long)]
    pub init_literals: Option<f64>,

    /// Passes over the training data [default: 1].
    #[arg(long)]
    pub epochs: Option<usize>,

    /// Random seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ConfigArgs {
    /// Flag, then config file, then default.
    pub fn resolve(&self) -> Result<TrainConfig> {
        let mut config = match &self.config {
            Some(path) => load_config_file(path)?,
            None => TrainConfig::default(),
        };
        if let Some(v) = self.rules {
            config.n_rules = v;
        }
        if let Some(v) = self.batch_size {
            config.batch_size = v;
        }
        if let Some(v) = self.max_flips {
            config.max_flips_per_batch = v;
        }
        if let Some(v) = self.init_literals {
            config.init_expected_literals = v;
        }
        if let Some(v) = self.epochs {
            config.epochs = v;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        config.validate()?;
        Ok(config)
    }
}

pub fn load_config_file(path: &Path) -> Result<TrainConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
    let config: TrainConfig = toml::from_str(&text)
        .map_err(|e| UsageError(format!("invalid config {}: {e}", path.display())))?;
    Ok(config)
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training CSV file with a header row.
    #[arg(long)]
    pub data: PathBuf,

    #[command(flatten)]
    pub data_opts: DataArgs,

    #[command(flatten)]
    pub config: ConfigArgs,

    /// Model output path.
    #[arg(long, default_value = "model.json")]
    pub out: PathBuf,

    /// Also write the per-batch trace (training accuracies only).
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model file written by `train`.
    #[arg(long)]
    pub model: PathBuf,

    /// CSV file to classify; a label column, if present, is ignored.
    #[arg(long)]
    pub data: PathBuf,

    #[arg(long, default_value = "?")]
    pub missing_token: String,

    /// Write predictions here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// TOML manifest listing datasets with their label and column options.
    #[arg(long, required_unless_present = "data")]
    pub manifest: Option<PathBuf>,

    /// Dataset CSV files (alternative to --manifest; all share the data flags).
    #[arg(long, conflicts_with = "manifest")]
    pub data: Vec<PathBuf>,

    /// Only run these manifest entries.
    #[arg(long, value_delimiter = ',', value_name = "NAMES")]
    pub only: Vec<String>,

    #[command(flatten)]
    pub data_opts: DataArgs,

    #[command(flatten)]
    pub config: ConfigArgs,

    /// Number of cross-validation folds.
    #[arg(long, default_value_t = 10)]
    pub folds: usize,

    /// Deal each class evenly across folds.
    #[arg(long)]
    pub stratified: bool,

    /// JSON file of reference accuracies shown as an extra table column.
    #[arg(long)]
    pub reference: Option<PathBuf>,

    /// JSON report output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub data: PathBuf,

    #[command(flatten)]
    pub data_opts: DataArgs,

    #[command(flatten)]
    pub config: ConfigArgs,

    /// Fraction of rows held out as a test set.
    #[arg(long, default_value_t = 0.2)]
    pub holdout: f64,

    /// Trace CSV output path.
    #[arg(long, default_value = "trace.csv")]
    pub trace_out: PathBuf,

    /// Also save the trained model.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub model: PathBuf,

    /// Write the rule list here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Fails early with a validation error when an input path is absent.
pub fn require_file(path: &Path) -> Result<()> {
    if !path.is_file() {
        return Err(rulenet_core::Error::MissingFile(path.to_path_buf()))
            .with_context(|| format!("input {}", path.display()));
    }
    Ok(())
}
