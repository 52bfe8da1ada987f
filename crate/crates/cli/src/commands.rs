use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use log::warn;
use rulenet_core::boolnet::to_dnf;
use rulenet_core::dataset::{derive_seed, holdout_split, prepare, EncodedDataset, IngestOptions, PrepareOptions, RawTable};
use rulenet_core::eval::{cross_validate, remap_minority, BenchmarkReport, CvOptions, ReferenceAccuracies, TraceRecorder};
use rulenet_core::model::{Model, TrainingInfo};
use rulenet_core::trainer::{fit, TrainConfig};

use crate::args::{require_file, BenchmarkArgs, DataArgs, ExportArgs, PredictArgs, TraceArgs, TrainArgs};
use crate::manifest::Manifest;
use crate::UsageError;

/// Seed stream of the trace command's train/holdout split.
const HOLDOUT_STREAM: u64 = 0x686f_6c64;

fn write_output(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn load(path: &Path, label: Option<&str>, ingest: &IngestOptions, prep: &PrepareOptions) -> Result<EncodedDataset> {
    require_file(path)?;
    let table = RawTable::read(path, ingest)?;
    let label = match label {
        Some(l) => l.to_string(),
        None => table
            .column_names()
            .last()
            .map(str::to_string)
            .ok_or_else(|| UsageError(format!("{} has no columns", path.display())))?,
    };
    let data = prepare(&table, &label, prep).with_context(|| format!("preparing {}", path.display()))?;
    Ok(data)
}

fn load_with(path: &Path, opts: &DataArgs) -> Result<EncodedDataset> {
    load(path, opts.label.as_deref(), &opts.ingest(), &opts.prepare()?)
}

fn describe(path: &Path, data: &EncodedDataset) {
    println!(
        "data: {} ({} instances, {} attributes, {} literals; label `{}`, positive `{}` {}, negative `{}` {})",
        path.display(),
        data.n_instances(),
        data.schema().n_attributes(),
        data.n_literals(),
        data.label_column(),
        data.positive_class(),
        data.n_positive(),
        data.negative_class(),
        data.n_instances() - data.n_positive(),
    );
}

fn echo_config(config: &TrainConfig) -> Result<()> {
    println!("config: {}", serde_json::to_string(config)?);
    Ok(())
}

fn echo_batch_size(config: &TrainConfig, n: usize) {
    println!(
        "batch size: {} ({})",
        config.batch_size.resolve(n).min(n),
        config.batch_size
    );
}

pub fn train(args: &TrainArgs) -> Result<ExitCode> {
    let config = args.config.resolve()?;
    let data = load_with(&args.data, &args.data_opts)?;
    describe(&args.data, &data);
    echo_config(&config)?;
    echo_batch_size(&config, data.n_instances());

    let mut recorder = args.trace_out.as_ref().map(|_| TraceRecorder::new());
    let outcome = fit(&data, &config, recorder.as_mut(), None)?;
    outcome
        .report
        .check_invariants(config.max_flips_per_batch)
        .map_err(|e| anyhow::anyhow!("training invariant violated: {e}"))?;

    let model = Model::new(
        outcome.network,
        data.label_column(),
        Some(TrainingInfo {
            config: config.clone(),
            n_instances: data.n_instances(),
            train_accuracy: outcome.report.final_train_accuracy,
        }),
    );
    model.save(&args.out)?;
    if let (Some(path), Some(rec)) = (&args.trace_out, &recorder) {
        rec.write_csv(path)?;
        println!("trace: {} ({} batches)", path.display(), rec.records().len());
    }
    println!(
        "flips: {} over {} batches",
        outcome.report.n_flips(),
        outcome.report.batches.len()
    );
    println!(
        "training accuracy: {:.4} (before re-selection {:.4})",
        outcome.report.final_train_accuracy, outcome.report.pre_reselection_train_accuracy
    );
    println!(
        "selected rules: {} of {}",
        model.network.or_layer.n_selected(),
        model.network.n_rules()
    );
    println!("model: {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}

pub fn predict(args: &PredictArgs) -> Result<ExitCode> {
    require_file(&args.model)?;
    require_file(&args.data)?;
    let model = Model::load(&args.model)?;
    let ingest = IngestOptions {
        missing_token: args.missing_token.clone(),
        ..IngestOptions::default()
    };
    let table = RawTable::read(&args.data, &ingest)?;
    let mut out = String::new();
    if table.n_rows() == 0 {
        warn!("{} has no rows; nothing to predict", args.data.display());
    } else {
        let (features, stats) = model.schema().encode_table(&table)?;
        if stats.unseen_values > 0 {
            warn!(
                "{} cell(s) hold values not seen in training; encoded as unknown",
                stats.unseen_values
            );
        }
        let predictions = model.network.predict(&features)?;
        out.reserve(predictions.len() * 8);
        for p in predictions.iter() {
            out.push_str(if p {
                &model.network.positive_class
            } else {
                &model.network.negative_class
            });
            out.push('\n');
        }
    }
    match &args.out {
        Some(path) => write_output(path, &out)?,
        None => std::io::stdout().lock().write_all(out.as_bytes())?,
    }
    Ok(ExitCode::SUCCESS)
}

pub fn export_dnf(args: &ExportArgs) -> Result<ExitCode> {
    require_file(&args.model)?;
    let model = Model::load(&args.model)?;
    let text = to_dnf(&model.network).to_string();
    match &args.out {
        Some(path) => write_output(path, &text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

pub fn trace(args: &TraceArgs) -> Result<ExitCode> {
    if !(args.holdout > 0.0 && args.holdout < 1.0) {
        return Err(UsageError(format!("--holdout must lie in (0, 1), got {}", args.holdout)).into());
    }
    let config = args.config.resolve()?;
    let data = load_with(&args.data, &args.data_opts)?;
    describe(&args.data, &data);
    echo_config(&config)?;

    let (train_idx, test_idx) = holdout_split(
        data.n_instances(),
        args.holdout,
        derive_seed(config.seed, HOLDOUT_STREAM),
    )?;
    println!("holdout: {} test / {} train", test_idx.len(), train_idx.len());
    let (train, test) = remap_minority(data.subset(&train_idx), data.subset(&test_idx));
    echo_batch_size(&config, train.n_instances());

    let mut recorder = TraceRecorder::new();
    let outcome = fit(&train, &config, Some(&mut recorder), Some(&test))?;
    outcome
        .report
        .check_invariants(config.max_flips_per_batch)
        .map_err(|e| anyhow::anyhow!("training invariant violated: {e}"))?;
    recorder.write_csv(&args.trace_out)?;

    let test_acc = rulenet_core::eval::accuracy(&outcome.network.predict(test.features())?, test.labels())?;
    println!("trace: {} ({} batches)", args.trace_out.display(), recorder.records().len());
    println!(
        "training accuracy: {:.4} (before re-selection {:.4})",
        outcome.report.final_train_accuracy, outcome.report.pre_reselection_train_accuracy
    );
    println!("holdout accuracy: {test_acc:.4}");
    if let Some(path) = &args.out {
        let model = Model::new(
            outcome.network,
            train.label_column(),
            Some(TrainingInfo {
                config,
                n_instances: train.n_instances(),
                train_accuracy: outcome.report.final_train_accuracy,
            }),
        );
        model.save(path)?;
        println!("model: {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

struct Job {
    name: String,
    path: std::path::PathBuf,
    label: Option<String>,
    prep: PrepareOptions,
}

fn jobs(args: &BenchmarkArgs) -> Result<Vec<Job>> {
    let global = args.data_opts.prepare()?;
    let mut jobs = Vec::new();
    if let Some(path) = &args.manifest {
        let manifest = Manifest::load(path)?;
        for name in &args.only {
            if !manifest.datasets.iter().any(|d| &d.name == name) {
                return Err(UsageError(format!("--only: `{name}` is not in the manifest")).into());
            }
        }
        for d in manifest.datasets {
            if !args.only.is_empty() && !args.only.contains(&d.name) {
                continue;
            }
            let mut nominal = d.nominal;
            nominal.extend(global.nominal.iter().cloned());
            jobs.push(Job {
                name: d.name,
                path: d.path,
                label: d.label.or_else(|| args.data_opts.label.clone()),
                prep: PrepareOptions {
                    n_bins: d.bins.or(global.n_bins),
                    nominal,
                },
            });
        }
    } else {
        for path in &args.data {
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            jobs.push(Job {
                name,
                path: path.clone(),
                label: args.data_opts.label.clone(),
                prep: global.clone(),
            });
        }
    }
    Ok(jobs)
}

pub fn benchmark(args: &BenchmarkArgs) -> Result<ExitCode> {
    let config = args.config.resolve()?;
    let cv = CvOptions {
        n_folds: args.folds,
        seed: config.seed,
        stratified: args.stratified,
    };
    if cv.n_folds < 2 {
        return Err(UsageError(format!("--folds must be at least 2, got {}", cv.n_folds)).into());
    }
    let reference = match &args.reference {
        Some(path) => Some(ReferenceAccuracies::load(path)?),
        None => None,
    };
    let jobs = jobs(args)?;
    echo_config(&config)?;
    println!(
        "cross-validation: {} folds{}",
        cv.n_folds,
        if cv.stratified { ", stratified" } else { "" }
    );

    let ingest = args.data_opts.ingest();
    let mut report = BenchmarkReport::new(reference.as_ref());
    for job in &jobs {
        let outcome = load(&job.path, job.label.as_deref(), &ingest, &job.prep)
            .and_then(|data| Ok(cross_validate(&job.name, &data, &config, &cv)?));
        match &outcome {
            Ok(r) => eprintln!(
                "{}: {:.4} ± {:.4} ({:.1}s)",
                job.name, r.mean_accuracy, r.std_accuracy, r.wall_time_secs
            ),
            Err(e) => eprintln!("{}: failed: {e:#}", job.name),
        }
        report.push(&job.name, outcome.map_err(|e| format!("{e:#}")), reference.as_ref());
    }

    print!("{}", report.to_table());
    if let Some(path) = &args.out {
        write_output(path, &report.to_json()?)?;
    }
    let failed = report.n_failed();
    if failed > 0 {
        eprintln!("error: {failed} of {} dataset(s) failed", jobs.len());
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}
