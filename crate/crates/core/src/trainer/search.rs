//! Cached scoring of every single-entry flip on one mini-batch.
//!
//! Rule activations over the batch are computed once. A flip only changes
//! its own rule's activation, which is rebuilt from a leave-one-literal-out
//! conjunction and at most one literal column; the prediction is then that
//! column ORed with the precomputed disjunction of the other selected rules.

use std::cmp::Ordering;

use crate::bits::BitVec;
use crate::boolnet::{AndLayer, Flip, FlipDirection, RuleNetwork};
use crate::dataset::EncodedDataset;

/// One mini-batch in literal-major layout.
pub(crate) struct BatchView {
    literal_cols: Vec<BitVec>,
    labels: BitVec,
}

impl BatchView {
    pub(crate) fn new(data: &EncodedDataset, batch: &[usize]) -> Self {
        let cols = data.features().select_rows(batch).transpose();
        Self {
            literal_cols: (0..cols.rows()).map(|l| cols.row(l)).collect(),
            labels: batch.iter().map(|&i| data.labels().get(i)).collect(),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.labels.len()
    }

    fn conjunction(&self, literals: impl Iterator<Item = usize>) -> BitVec {
        let mut act = BitVec::ones(self.len());
        for l in literals {
            act.and_assign(&self.literal_cols[l]);
        }
        act
    }

    pub(crate) fn activations(&self, layer: &AndLayer) -> Vec<BitVec> {
        (0..layer.n_rules())
            .map(|j| self.conjunction(layer.literals(j)))
            .collect()
    }

    /// Correctly classified instances under the network's current state.
    pub(crate) fn correct(&self, network: &RuleNetwork) -> usize {
        let acts = self.activations(&network.and_layer);
        let mut pred = BitVec::zeros(self.len());
        for j in network.or_layer.selected_rules() {
            pred.or_assign(&acts[j]);
        }
        pred.count_agreements(&self.labels)
    }
}

/// `len - popcount((others | (a & b)) ^ labels)`, word by word.
#[inline]
fn agreements(others: &[u64], a: &[u64], b: Option<&[u64]>, labels: &[u64], len: usize) -> usize {
    let mut diff = 0usize;
    match b {
        Some(b) => {
            for i in 0..labels.len() {
                diff += ((others[i] | (a[i] & b[i])) ^ labels[i]).count_ones() as usize;
            }
        }
        None => {
            for i in 0..labels.len() {
                diff += ((others[i] | a[i]) ^ labels[i]).count_ones() as usize;
            }
        }
    }
    len - diff
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Candidate {
    pub rule: usize,
    pub literal: usize,
    pub direction: FlipDirection,
    pub evicted: Option<usize>,
    pub correct: usize,
}

impl Candidate {
    pub(crate) fn to_flip(self) -> Flip {
        Flip {
            rule: self.rule,
            literal: self.literal,
            direction: self.direction,
            evicted: self.evicted.into_iter().collect(),
        }
    }

    /// Greater is preferred: more correct, then Remove before Add, then lower
    /// rule index, then lower literal index.
    pub(crate) fn preference(&self, other: &Self) -> Ordering {
        self.correct
            .cmp(&other.correct)
            .then_with(|| other.direction.cmp(&self.direction))
            .then_with(|| other.rule.cmp(&self.rule))
            .then_with(|| other.literal.cmp(&self.literal))
    }
}

/// Scores every legal flip, calling `visit` in enumeration order (rule, then
/// literal). Returns the correct count of the unflipped network.
pub(crate) fn scan_flips(
    network: &RuleNetwork,
    view: &BatchView,
    mut visit: impl FnMut(Candidate),
) -> usize {
    let layer = &network.and_layer;
    let schema = layer.schema();
    let n_rules = layer.n_rules();
    let len = view.len();
    let acts = view.activations(layer);

    // prefix[j] = OR of selected acts before j; suffix[j] = from j on.
    let mut prefix = Vec::with_capacity(n_rules + 1);
    prefix.push(BitVec::zeros(len));
    for j in 0..n_rules {
        let mut next = prefix[j].clone();
        if network.or_layer.is_selected(j) {
            next.or_assign(&acts[j]);
        }
        prefix.push(next);
    }
    let mut suffix = vec![BitVec::zeros(len); n_rules + 1];
    for j in (0..n_rules).rev() {
        suffix[j] = suffix[j + 1].clone();
        if network.or_layer.is_selected(j) {
            suffix[j].or_assign(&acts[j]);
        }
    }
    let labels = view.labels.words();
    let base = prefix[n_rules].count_agreements(&view.labels);
    let empty = BitVec::zeros(len);

    for j in 0..n_rules {
        let selected = network.or_layer.is_selected(j);
        let others = prefix[j].or(&suffix[j + 1]);
        let rule_lits: Vec<usize> = layer.literals(j).collect();
        // Conjunction of the rule minus its i-th literal.
        let loo: Vec<BitVec> = (0..rule_lits.len())
            .map(|i| {
                view.conjunction(
                    rule_lits
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != i)
                        .map(|(_, &l)| l),
                )
            })
            .collect();
        let position = |l: usize| rule_lits.iter().position(|&x| x == l);

        for l in 0..layer.n_literals() {
            let (direction, evicted, a, b) = match position(l) {
                Some(i) => (FlipDirection::Remove, None, &loo[i], None),
                None => {
                    let attr = schema.attribute_of(l);
                    let col = Some(view.literal_cols[l].words());
                    match schema.literal_range(attr).find_map(position) {
                        Some(i) => (FlipDirection::Add, Some(rule_lits[i]), &loo[i], col),
                        None => (FlipDirection::Add, None, &acts[j], col),
                    }
                }
            };
            // An unselected rule cannot change the prediction.
            let a = if selected { a } else { &empty };
            let correct = agreements(others.words(), a.words(), b, labels, len);
            visit(Candidate {
                rule: j,
                literal: l,
                direction,
                evicted,
                correct,
            });
        }
    }
    base
}

/// The preferred flip and the unflipped correct count.
pub(crate) fn best_flip(network: &RuleNetwork, view: &BatchView) -> (Option<Candidate>, usize) {
    let mut best: Option<Candidate> = None;
    let base = scan_flips(network, view, |c| {
        if best.is_none_or(|b| c.preference(&b) == Ordering::Greater) {
            best = Some(c);
        }
    });
    (best, base)
}
