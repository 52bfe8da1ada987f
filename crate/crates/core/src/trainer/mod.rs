//! Mini-batch training of the rule network.
//!
//! Rules start as random conjunctions (each attribute joins a rule with
//! probability `init_expected_literals / |attributes|`) and all rules start
//! selected. Each mini-batch allows up to `max_flips_per_batch` greedy
//! AND-layer flips, each the single flip with the largest strictly positive
//! accuracy gain on that batch. Training ends by rebuilding the OR layer
//! greedily on the full training set.

mod config;
mod search;

use std::sync::Arc;

use log::warn;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use config::{BatchSize, TrainConfig};

use crate::bits::BitVec;
use crate::boolnet::{apply_flip, predict, AndLayer, Flip, FlipDirection, OrLayer, RuleNetwork};
use crate::dataset::{derive_seed, minibatches, rng, AttributeSchema, EncodedDataset};
use crate::error::{Error, Result};
use crate::eval::{accuracy, TraceRecord, TraceRecorder};
use search::{best_flip, BatchView};

/// An evaluated flip. `delta` is the batch accuracy gain over the unflipped
/// network on the same batch.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipEvaluation {
    pub flip: Flip,
    pub batch_accuracy_after: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReselectionStep {
    pub rule: usize,
    pub accuracy_before: f64,
    pub accuracy_after: f64,
}

/// What happened during [`fit`]; used to audit the training invariants.
#[derive(Debug, Clone, Default)]
pub struct TrainReport {
    pub batch_size: usize,
    /// Applied flips, one entry per mini-batch.
    pub batches: Vec<Vec<FlipEvaluation>>,
    pub reselection: Vec<ReselectionStep>,
    pub majority_fraction: f64,
    pub pre_reselection_train_accuracy: f64,
    pub final_train_accuracy: f64,
}

impl TrainReport {
    pub fn n_flips(&self) -> usize {
        self.batches.iter().map(Vec::len).sum()
    }

    /// Checks that every applied flip strictly improved its batch, that no
    /// batch exceeded the flip budget, that every re-selected rule strictly
    /// improved training accuracy, and that the final model is no worse
    /// than predicting the majority class.
    pub fn check_invariants(&self, max_flips_per_batch: usize) -> Result<(), String> {
        for (b, flips) in self.batches.iter().enumerate() {
            if flips.len() > max_flips_per_batch {
                return Err(format!("batch {b}: {} flips > {max_flips_per_batch}", flips.len()));
            }
            if let Some(f) = flips.iter().find(|f| f.delta <= 0.0) {
                return Err(format!("batch {b}: non-improving flip {f:?}"));
            }
        }
        if let Some(s) = self.reselection.iter().find(|s| s.accuracy_after <= s.accuracy_before) {
            return Err(format!("re-selection step did not improve: {s:?}"));
        }
        if self.final_train_accuracy + 1e-12 < self.majority_fraction {
            return Err(format!(
                "final accuracy {} below majority baseline {}",
                self.final_train_accuracy, self.majority_fraction
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub network: RuleNetwork,
    pub report: TrainReport,
}

/// Random rule bodies: per rule and attribute, with probability
/// `min(1, init_expected_literals / |attributes|)` one uniformly chosen
/// value of that attribute joins the rule.
pub fn init_and_layer<R: Rng + ?Sized>(
    schema: &Arc<AttributeSchema>,
    config: &TrainConfig,
    rng: &mut R,
) -> AndLayer {
    let n_attr = schema.n_attributes();
    let p = if n_attr == 0 {
        0.0
    } else {
        (config.init_expected_literals / n_attr as f64).min(1.0)
    };
    let rules = (0..config.n_rules)
        .map(|_| {
            let mut bits = BitVec::zeros(schema.n_literals());
            for (a, attr) in schema.attributes().iter().enumerate() {
                let include = rng.random::<f64>() < p;
                let value = rng.random_range(0..attr.arity());
                if include {
                    bits.set(schema.literal(a, value), true);
                }
            }
            bits
        })
        .collect();
    AndLayer::from_bitvecs(Arc::clone(schema), rules)
}

/// Every rule starts in the rule set.
pub fn init_or_layer(n_rules: usize) -> OrLayer {
    OrLayer::all(n_rules)
}

/// Every legal single flip, ordered by rule, then literal. Each AND-layer
/// entry flips exactly one way, so there are `n_rules × n_literals` flips.
pub fn enumerate_flips(and_layer: &AndLayer) -> Vec<Flip> {
    let mut flips = Vec::with_capacity(and_layer.n_rules() * and_layer.n_literals());
    for j in 0..and_layer.n_rules() {
        for l in 0..and_layer.n_literals() {
            flips.push(if and_layer.contains(j, l) {
                Flip::remove(j, l)
            } else {
                Flip::add(and_layer, j, l)
            });
        }
    }
    flips
}

/// Accuracy of the network with `flip` applied on a batch, and the change
/// relative to the unflipped network.
pub fn evaluate_flip(
    network: &RuleNetwork,
    flip: &Flip,
    batch_features: &crate::bits::BitMatrix,
    batch_labels: &BitVec,
) -> Result<FlipEvaluation> {
    let flipped = network.with_and_layer(apply_flip(&network.and_layer, flip)?);
    let before = accuracy(&predict(batch_features, network)?, batch_labels)?;
    let after = accuracy(&predict(batch_features, &flipped)?, batch_labels)?;
    Ok(FlipEvaluation {
        flip: flip.clone(),
        batch_accuracy_after: after,
        delta: after - before,
    })
}

fn train_on_view(
    mut network: RuleNetwork,
    view: &BatchView,
    max_flips: usize,
) -> (RuleNetwork, Vec<FlipEvaluation>) {
    let n = view.len() as f64;
    let mut applied = Vec::new();
    for _ in 0..max_flips {
        let (best, base) = best_flip(&network, view);
        let Some(best) = best.filter(|c| c.correct > base) else {
            break;
        };
        let flip = best.to_flip();
        let layer = apply_flip(&network.and_layer, &flip).expect("search only yields legal flips");
        network = network.with_and_layer(layer);
        applied.push(FlipEvaluation {
            flip,
            batch_accuracy_after: best.correct as f64 / n,
            delta: (best.correct - base) as f64 / n,
        });
    }
    (network, applied)
}

/// Applies up to `config.max_flips_per_batch` greedy flips for one batch.
///
/// Each round picks the flip with the largest strictly positive accuracy
/// gain on the batch (ties: Remove before Add, then lowest rule index, then
/// lowest literal index) and re-scores from the new state.
pub fn train_on_batch(
    network: &RuleNetwork,
    batch: &[usize],
    data: &EncodedDataset,
    config: &TrainConfig,
) -> Result<(RuleNetwork, Vec<FlipEvaluation>)> {
    if batch.is_empty() {
        return Err(Error::Empty("mini-batch"));
    }
    let view = BatchView::new(data, batch);
    Ok(train_on_view(network.clone(), &view, config.max_flips_per_batch))
}

fn rule_activations(network: &RuleNetwork, literal_cols: &crate::bits::BitMatrix) -> Vec<BitVec> {
    let n = literal_cols.cols();
    (0..network.n_rules())
        .map(|j| {
            let mut act = BitVec::ones(n);
            for l in network.and_layer.literals(j) {
                act.and_assign(&literal_cols.row(l));
            }
            act
        })
        .collect()
}

/// Rebuilds the OR layer on the full training data: starting from no rules,
/// repeatedly add the rule that raises training accuracy the most (ties:
/// lowest index) while some rule raises it strictly.
pub fn reselect_rules(
    network: &RuleNetwork,
    data: &EncodedDataset,
) -> Result<(RuleNetwork, Vec<ReselectionStep>)> {
    if data.n_instances() == 0 {
        return Err(Error::Empty("training data"));
    }
    let n = data.n_instances();
    let acts = rule_activations(network, &data.literal_columns());
    let labels = data.labels();
    let mut selected = OrLayer::none(network.n_rules());
    let mut pred = BitVec::zeros(n);
    let mut correct = pred.count_agreements(labels);
    let mut steps = Vec::new();
    loop {
        let mut best: Option<(usize, usize)> = None;
        for j in (0..network.n_rules()).filter(|&j| !selected.is_selected(j)) {
            let c = pred.or(&acts[j]).count_agreements(labels);
            if best.is_none_or(|(_, bc)| c > bc) {
                best = Some((j, c));
            }
        }
        match best {
            Some((j, c)) if c > correct => {
                steps.push(ReselectionStep {
                    rule: j,
                    accuracy_before: correct as f64 / n as f64,
                    accuracy_after: c as f64 / n as f64,
                });
                selected = selected.with(j, true);
                pred.or_assign(&acts[j]);
                correct = c;
            }
            _ => break,
        }
    }
    Ok((network.with_or_layer(selected), steps))
}

fn check_holdout(data: &EncodedDataset, holdout: &EncodedDataset) -> Result<()> {
    if data.schema() != holdout.schema() {
        return Err(Error::invalid("holdout schema differs from training schema"));
    }
    if data.positive_class() != holdout.positive_class() {
        return Err(Error::invalid("holdout class mapping differs from training"));
    }
    Ok(())
}

/// Trains a network on `data`.
///
/// With a trace recorder attached, one record per mini-batch is appended
/// holding the batch accuracy after its flips, the full training accuracy
/// and, if a holdout set is given, the holdout accuracy. The holdout never
/// influences training. The result is a pure function of `data` and
/// `config`.
pub fn fit(
    data: &EncodedDataset,
    config: &TrainConfig,
    mut trace: Option<&mut TraceRecorder>,
    holdout: Option<&EncodedDataset>,
) -> Result<FitOutcome> {
    config.validate()?;
    let n = data.n_instances();
    if n == 0 {
        return Err(Error::Empty("training data"));
    }
    if let Some(h) = holdout {
        check_holdout(data, h)?;
    }
    let mut batch_size = config.batch_size.resolve(n);
    if batch_size > n {
        warn!("batch size {batch_size} exceeds {n} training instances; using {n}");
        batch_size = n;
    }

    let mut init_rng = rng(derive_seed(config.seed, 0));
    let and_layer = init_and_layer(data.schema_arc(), config, &mut init_rng);
    let mut network = RuleNetwork::new(
        and_layer,
        init_or_layer(config.n_rules),
        data.positive_class(),
        data.negative_class(),
    )?;

    let mut report = TrainReport {
        batch_size,
        majority_fraction: data.majority_fraction(),
        ..Default::default()
    };
    let mut batch_index = 0;
    for epoch in 0..config.epochs {
        let batches = minibatches(n, batch_size, derive_seed(config.seed, 1 + epoch as u64))?;
        for batch in batches.iter() {
            let view = BatchView::new(data, batch);
            let (next, flips) = train_on_view(network, &view, config.max_flips_per_batch);
            network = next;
            report.batches.push(flips);
            batch_index += 1;
            if let Some(sink) = trace.as_deref_mut() {
                let test_accuracy = match holdout {
                    Some(h) if h.n_instances() > 0 => {
                        Some(accuracy(&predict(h.features(), &network)?, h.labels())?)
                    }
                    _ => None,
                };
                sink.record(TraceRecord {
                    batch_index,
                    minibatch_accuracy: view.correct(&network) as f64 / view.len() as f64,
                    train_accuracy: accuracy(&predict(data.features(), &network)?, data.labels())?,
                    test_accuracy,
                })?;
            }
        }
    }
    report.pre_reselection_train_accuracy =
        accuracy(&predict(data.features(), &network)?, data.labels())?;

    let (network, steps) = reselect_rules(&network, data)?;
    report.reselection = steps;
    report.final_train_accuracy = accuracy(&predict(data.features(), &network)?, data.labels())?;
    Ok(FitOutcome { network, report })
}

impl FlipEvaluation {
    pub fn is_removal(&self) -> bool {
        self.flip.direction == FlipDirection::Remove
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::dataset::Attribute;

    fn schema(arities: &[usize]) -> Arc<AttributeSchema> {
        Arc::new(
            AttributeSchema::new(
                arities
                    .iter()
                    .enumerate()
                    .map(|(a, &k)| Attribute::nominal(format!("A{a}"), (0..k).map(|v| format!("v{v}"))))
                    .collect(),
            )
            .unwrap(),
        )
    }

    #[test]
    fn init_with_three_attributes_includes_all() {
        let s = schema(&[2, 3, 4]);
        let layer = init_and_layer(&s, &TrainConfig::default(), &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(layer.n_rules(), 20);
        for j in 0..20 {
            for a in 0..3 {
                assert_eq!(layer.literals_of_attribute(j, a).len(), 1);
            }
        }
    }

    #[test]
    fn init_is_seeded() {
        let s = schema(&[3; 8]);
        let c = TrainConfig::default();
        let a = init_and_layer(&s, &c, &mut ChaCha8Rng::seed_from_u64(5));
        let b = init_and_layer(&s, &c, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
    }

    #[test]
    fn or_layer_starts_full() {
        assert_eq!(init_or_layer(20).n_selected(), 20);
        assert_eq!(init_or_layer(1), OrLayer::all(1));
    }

    #[test]
    fn enumerate_small_layer() {
        let s = schema(&[2]);
        let layer = AndLayer::from_literals(s.clone(), &[vec![0]]).unwrap();
        assert_eq!(
            enumerate_flips(&layer),
            vec![
                Flip::remove(0, 0),
                Flip { rule: 0, literal: 1, direction: FlipDirection::Add, evicted: vec![0] },
            ]
        );
        let empty = AndLayer::empty(schema(&[2, 3, 2]), 1);
        let flips = enumerate_flips(&empty);
        assert_eq!(flips.len(), 7);
        assert!(flips.iter().all(|f| f.direction == FlipDirection::Add && f.evicted.is_empty()));
    }

    fn tiny_data() -> EncodedDataset {
        // label = A0=v0 on 8 instances over A0 (2 values) x A1 (4 values)
        let s = schema(&[2, 4]);
        let rows: Vec<Vec<Option<usize>>> =
            (0..8).map(|i| vec![Some(i / 4), Some(i % 4)]).collect();
        let labels: Vec<bool> = (0..8).map(|i| i / 4 == 0).collect();
        EncodedDataset::from_values(s, &rows, &labels).unwrap()
    }

    #[test]
    fn repairing_flip_has_positive_delta() {
        let data = tiny_data();
        // A0=v1 fires exactly on the negatives: accuracy 0.
        let layer = AndLayer::from_literals(data.schema_arc().clone(), &[vec![1]]).unwrap();
        let net = RuleNetwork::new(layer, OrLayer::all(1), "p", "n").unwrap();
        let flip = Flip::add(&net.and_layer, 0, 0);
        assert_eq!(flip.evicted, vec![1]);
        let ev = evaluate_flip(&net, &flip, data.features(), data.labels()).unwrap();
        assert_eq!(ev.delta, 1.0);
        assert_eq!(ev.batch_accuracy_after, 1.0);
        let illegal = Flip::remove(0, 0);
        assert!(evaluate_flip(&net, &illegal, data.features(), data.labels()).is_err());
    }

    #[test]
    fn masked_rule_flip_changes_nothing() {
        let data = tiny_data();
        let layer = AndLayer::from_literals(data.schema_arc().clone(), &[vec![], vec![3]]).unwrap();
        let or = OrLayer::from_bits(BitVec::from_bools([true, false]));
        let net = RuleNetwork::new(layer, or, "p", "n").unwrap();
        for flip in enumerate_flips(&net.and_layer).into_iter().filter(|f| f.rule == 1) {
            let ev = evaluate_flip(&net, &flip, data.features(), data.labels()).unwrap();
            assert_eq!(ev.delta, 0.0);
        }
    }

    #[test]
    fn inverse_deltas_cancel() {
        let data = tiny_data();
        let layer = AndLayer::from_literals(data.schema_arc().clone(), &[vec![1, 3]]).unwrap();
        let net = RuleNetwork::new(layer, OrLayer::all(1), "p", "n").unwrap();
        for flip in enumerate_flips(&net.and_layer) {
            let ev = evaluate_flip(&net, &flip, data.features(), data.labels()).unwrap();
            let there = net.with_and_layer(apply_flip(&net.and_layer, &flip).unwrap());
            let back = evaluate_flip(&there, &flip.inverse(), data.features(), data.labels()).unwrap();
            assert!((ev.delta + back.delta).abs() < 1e-12);
        }
    }

    #[test]
    fn perfect_network_takes_no_flips() {
        let data = tiny_data();
        let layer = AndLayer::from_literals(data.schema_arc().clone(), &[vec![0]]).unwrap();
        let net = RuleNetwork::new(layer, OrLayer::all(1), "p", "n").unwrap();
        let all: Vec<usize> = (0..8).collect();
        let (out, flips) = train_on_batch(&net, &all, &data, &TrainConfig::default()).unwrap();
        assert!(flips.is_empty());
        assert_eq!(out, net);
        assert!(train_on_batch(&net, &[], &data, &TrainConfig::default()).is_err());
    }

    #[test]
    fn flip_budget_caps_improvements() {
        // label: A1 != v3. Rule k = {A0=v3, A1=vk} fires on one positive;
        // removing its A0 literal makes it cover all four A1=vk positives.
        let s = schema(&[4, 4]);
        let rows: Vec<Vec<Option<usize>>> = (0..16).map(|i| vec![Some(i / 4), Some(i % 4)]).collect();
        let labels: Vec<bool> = (0..16).map(|i| i % 4 != 3).collect();
        let data = EncodedDataset::from_values(s.clone(), &rows, &labels).unwrap();
        let lits = |k: usize| vec![s.literal(0, 3), s.literal(1, k)];
        let layer = AndLayer::from_literals(s.clone(), &[lits(0), lits(1), lits(2)]).unwrap();
        let net = RuleNetwork::new(layer, OrLayer::all(3), "p", "n").unwrap();
        let all: Vec<usize> = (0..16).collect();
        let (_, flips) = train_on_batch(&net, &all, &data, &TrainConfig::default()).unwrap();
        assert_eq!(flips.len(), 2);
        assert!(flips.iter().all(|f| f.delta > 0.0 && f.is_removal()));
        let one = TrainConfig { max_flips_per_batch: 3, ..Default::default() };
        let (out, flips) = train_on_batch(&net, &all, &data, &one).unwrap();
        assert_eq!(flips.len(), 3);
        assert_eq!(accuracy(&out.predict(data.features()).unwrap(), data.labels()).unwrap(), 1.0);
    }

    #[test]
    fn reselection_cases() {
        let data = tiny_data();
        let s = data.schema_arc().clone();
        // rule 0 covers one positive, rule 1 only negatives.
        let layer = AndLayer::from_literals(s.clone(), &[vec![0, 2], vec![1]]).unwrap();
        let net = RuleNetwork::new(layer, OrLayer::all(2), "p", "n").unwrap();
        let (out, steps) = reselect_rules(&net, &data).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(out.or_layer.selected_rules().collect::<Vec<_>>(), vec![0]);

        // empty rule fires everywhere; rules 1 and 2 are the exact concept.
        let exact_and_all = AndLayer::from_literals(s.clone(), &[vec![], vec![0], vec![0]]).unwrap();
        let net = RuleNetwork::new(exact_and_all, OrLayer::none(3), "p", "n").unwrap();
        let (out, steps) = reselect_rules(&net, &data).unwrap();
        assert_eq!(out.or_layer.selected_rules().collect::<Vec<_>>(), vec![1]);
        assert_eq!(steps[0].accuracy_after, 1.0);
    }

    #[test]
    fn reselection_of_silent_rules_keeps_majority() {
        let s = schema(&[2, 2]);
        let rows: Vec<Vec<Option<usize>>> = (0..6).map(|i| vec![Some(i % 2), None]).collect();
        let labels = [true, false, false, true, false, false];
        let data = EncodedDataset::from_values(s.clone(), &rows, &labels).unwrap();
        // every rule needs A1, which is unknown everywhere
        let layer = AndLayer::from_literals(s.clone(), &[vec![2], vec![3]]).unwrap();
        let net = RuleNetwork::new(layer, OrLayer::all(2), "p", "n").unwrap();
        let (out, steps) = reselect_rules(&net, &data).unwrap();
        assert!(steps.is_empty());
        assert_eq!(out.or_layer.n_selected(), 0);
        let acc = accuracy(&out.predict(data.features()).unwrap(), data.labels()).unwrap();
        assert_eq!(acc, data.majority_fraction());
    }

    #[test]
    fn fit_is_deterministic_and_auditable() {
        let data = tiny_data();
        let c = TrainConfig { batch_size: BatchSize::Fixed(3), seed: 11, ..Default::default() };
        let a = fit(&data, &c, None, None).unwrap();
        let b = fit(&data, &c, None, None).unwrap();
        assert_eq!(a.network, b.network);
        a.report.check_invariants(2).unwrap();
        assert_eq!(a.report.batches.len(), 3);
    }

    #[test]
    fn zero_flip_budget_is_init_plus_reselection() {
        let data = tiny_data();
        let c = TrainConfig { max_flips_per_batch: 0, seed: 4, ..Default::default() };
        let out = fit(&data, &c, None, None).unwrap();
        let layer = init_and_layer(data.schema_arc(), &c, &mut rng(derive_seed(4, 0)));
        let net = RuleNetwork::new(layer, init_or_layer(20), "positive", "negative").unwrap();
        let (expected, _) = reselect_rules(&net, &data).unwrap();
        assert_eq!(out.network, expected);
        assert_eq!(out.report.n_flips(), 0);
    }

    #[test]
    fn trace_train_accuracy_is_fresh() {
        let data = tiny_data();
        let mut rec = TraceRecorder::new();
        let c = TrainConfig { batch_size: BatchSize::Fixed(2), ..Default::default() };
        fit(&data, &c, Some(&mut rec), Some(&data)).unwrap();
        assert_eq!(rec.records().len(), 4);
        for r in rec.records() {
            assert_eq!(Some(r.train_accuracy), r.test_accuracy);
        }
    }
}
