//! Accuracy, k-fold cross-validation, training traces and benchmark reports.

mod report;
mod trace;

use std::time::Instant;

use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use report::{BenchmarkEntry, BenchmarkReport, ReferenceAccuracies};
pub use trace::{TraceRecord, TraceRecorder, TRACE_HEADER};

use crate::bits::BitVec;
use crate::dataset::{derive_seed, make_folds, make_stratified_folds, EncodedDataset};
use crate::error::{Error, Result};
use crate::trainer::{fit, TrainConfig};

/// Fraction of positions where `predictions` equals `labels`.
pub fn accuracy(predictions: &BitVec, labels: &BitVec) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            found: predictions.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::Empty("accuracy of zero predictions"));
    }
    Ok(predictions.count_agreements(labels) as f64 / labels.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvOptions {
    pub n_folds: usize,
    /// Seed of the fold assignment. Per-fold training seeds derive from the
    /// training config's seed.
    pub seed: u64,
    pub stratified: bool,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self {
            n_folds: 10,
            seed: 0,
            stratified: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub dataset_name: String,
    pub n_instances: usize,
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    /// Sample standard deviation over folds.
    pub std_accuracy: f64,
    pub wall_time_secs: f64,
    pub config: TrainConfig,
    pub cv: CvOptions,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Re-derives the class mapping from the training portion so the positive
/// label is its minority class; applies the same mapping to the test part.
pub fn remap_minority(train: EncodedDataset, test: EncodedDataset) -> (EncodedDataset, EncodedDataset) {
    let pos = train.n_positive();
    let neg = train.n_instances() - pos;
    let swap = pos > neg || (pos == neg && train.positive_class() > train.negative_class());
    if swap {
        (train.swap_classes(), test.swap_classes())
    } else {
        (train, test)
    }
}

/// Accuracy of a model trained on all folds but `fold`, measured on `fold`.
pub fn evaluate_fold(
    data: &EncodedDataset,
    train_idx: &[usize],
    test_idx: &[usize],
    config: &TrainConfig,
) -> Result<f64> {
    let (train, test) = remap_minority(data.subset(train_idx), data.subset(test_idx));
    let outcome = fit(&train, config, None, None)?;
    outcome
        .report
        .check_invariants(config.max_flips_per_batch)
        .map_err(|e| Error::invalid(format!("training invariant violated: {e}")))?;
    accuracy(&outcome.network.predict(test.features())?, test.labels())
}

/// k-fold cross-validation. Fold `f` trains with seed
/// `derive_seed(config.seed, f)`; an `auto` batch size resolves from each
/// fold's training size. Folds run in parallel; results are in fold order.
pub fn cross_validate(
    name: &str,
    data: &EncodedDataset,
    config: &TrainConfig,
    options: &CvOptions,
) -> Result<BenchmarkResult> {
    config.validate()?;
    let start = Instant::now();
    let plan = if options.stratified {
        make_stratified_folds(data.labels(), options.n_folds, options.seed)?
    } else {
        make_folds(data.n_instances(), options.n_folds, options.seed)?
    };
    let fold_accuracies = (0..options.n_folds)
        .into_par_iter()
        .map(|f| {
            let fold_config = TrainConfig {
                seed: derive_seed(config.seed, f as u64),
                ..config.clone()
            };
            let acc = evaluate_fold(data, &plan.train_indices(f), &plan.test_indices(f), &fold_config)?;
            debug!("{name}: fold {f} accuracy {acc:.4}");
            Ok(acc)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(BenchmarkResult {
        dataset_name: name.to_string(),
        n_instances: data.n_instances(),
        mean_accuracy: mean(&fold_accuracies),
        std_accuracy: sample_std(&fold_accuracies),
        fold_accuracies,
        wall_time_secs: start.elapsed().as_secs_f64(),
        config: config.clone(),
        cv: options.clone(),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::dataset::{Attribute, AttributeSchema};

    #[test]
    fn accuracy_cases() {
        let l = BitVec::from_bools([true, false, true, false]);
        assert_eq!(accuracy(&l, &l).unwrap(), 1.0);
        assert_eq!(accuracy(&l.not(), &l).unwrap(), 0.0);
        assert_eq!(accuracy(&BitVec::ones(4), &l).unwrap(), 0.5);
        assert!(accuracy(&BitVec::ones(3), &l).is_err());
        assert!(accuracy(&BitVec::zeros(0), &BitVec::zeros(0)).is_err());
    }

    #[test]
    fn std_of_constant_is_zero() {
        assert_eq!(sample_std(&[0.5; 10]), 0.0);
        assert!((sample_std(&[0.0, 1.0]) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    fn concept_data(n: usize) -> EncodedDataset {
        let schema = Arc::new(
            AttributeSchema::new(
                (0..3)
                    .map(|a| Attribute::nominal(format!("A{a}"), ["x", "y", "z"]))
                    .collect(),
            )
            .unwrap(),
        );
        let rows: Vec<Vec<Option<usize>>> = (0..n)
            .map(|i| vec![Some(i % 3), Some(i / 3 % 3), Some(i / 9 % 3)])
            .collect();
        let labels: Vec<bool> = rows.iter().map(|r| r[0] == Some(0)).collect();
        EncodedDataset::from_values(schema, &rows, &labels).unwrap()
    }

    #[test]
    fn cv_is_deterministic_and_consistent() {
        let data = concept_data(90);
        let opts = CvOptions { n_folds: 5, seed: 3, stratified: false };
        let a = cross_validate("toy", &data, &TrainConfig::default(), &opts).unwrap();
        let b = cross_validate("toy", &data, &TrainConfig::default(), &opts).unwrap();
        assert_eq!(a.fold_accuracies, b.fold_accuracies);
        assert_eq!(a.fold_accuracies.len(), 5);
        assert!((a.mean_accuracy - mean(&a.fold_accuracies)).abs() < 1e-12);
        assert!(a.mean_accuracy > 0.9, "{a:?}");
    }

    #[test]
    fn fold_minority_is_rederived() {
        let data = concept_data(9);
        // Train only on positives plus one negative: positives are the majority there.
        let (train, test) = remap_minority(data.subset(&[0, 3, 6, 1]), data.subset(&[2]));
        assert_eq!(train.n_positive(), 1);
        assert_eq!(train.positive_class(), "negative");
        assert!(test.labels().get(0));
    }
}
