//! The three-layer boolean rule network.
//!
//! Literals feed an AND layer whose columns are rules (conjunctions), and an
//! OR layer selects which rules form the rule set (a disjunction). Both
//! layers are evaluated as boolean matrix products; the conjunction uses De
//! Morgan's law: a rule fires unless some literal it requires is false, i.e.
//! `act = ¬(¬X @ M)`.

mod dnf;
mod flip;

use std::sync::Arc;

pub use dnf::{parse_dnf, to_dnf, RuleSetDocument};
pub use flip::{apply_flip, Flip, FlipDirection};

use crate::bits::{BitMatrix, BitVec};
use crate::dataset::AttributeSchema;
use crate::error::{Error, Result};

/// Literal membership per rule. Stored rule-major (one bit-packed literal
/// set per rule); [`AndLayer::membership`] gives the literals × rules view.
#[derive(Debug, Clone, PartialEq)]
pub struct AndLayer {
    schema: Arc<AttributeSchema>,
    rules: Vec<BitVec>,
}

impl AndLayer {
    /// `n_rules` rules with no literals.
    pub fn empty(schema: Arc<AttributeSchema>, n_rules: usize) -> Self {
        let rules = vec![BitVec::zeros(schema.n_literals()); n_rules];
        Self { schema, rules }
    }

    /// Builds a layer from per-rule literal indices.
    pub fn from_literals(schema: Arc<AttributeSchema>, rules: &[Vec<usize>]) -> Result<Self> {
        let n = schema.n_literals();
        let mut out = Vec::with_capacity(rules.len());
        for (j, lits) in rules.iter().enumerate() {
            let mut bits = BitVec::zeros(n);
            for &l in lits {
                if l >= n {
                    return Err(Error::invalid(format!("rule {j}: literal {l} out of range")));
                }
                bits.set(l, true);
            }
            out.push(bits);
        }
        let layer = Self { schema, rules: out };
        if let Some((j, a)) = layer.first_contradiction() {
            return Err(Error::invalid(format!(
                "rule {j} holds several values of `{}`",
                layer.schema.attributes()[a].name
            )));
        }
        Ok(layer)
    }

    pub(crate) fn from_bitvecs(schema: Arc<AttributeSchema>, rules: Vec<BitVec>) -> Self {
        debug_assert!(rules.iter().all(|r| r.len() == schema.n_literals()));
        Self { schema, rules }
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn schema_arc(&self) -> &Arc<AttributeSchema> {
        &self.schema
    }

    pub fn n_rules(&self) -> usize {
        self.rules.len()
    }

    pub fn n_literals(&self) -> usize {
        self.schema.n_literals()
    }

    pub fn rule(&self, j: usize) -> &BitVec {
        &self.rules[j]
    }

    pub fn contains(&self, rule: usize, literal: usize) -> bool {
        self.rules[rule].get(literal)
    }

    pub fn literals(&self, rule: usize) -> impl Iterator<Item = usize> + '_ {
        self.rules[rule].iter_ones()
    }

    /// Literals of `attribute` present in `rule`, ascending.
    pub fn literals_of_attribute(&self, rule: usize, attribute: usize) -> Vec<usize> {
        self.schema
            .literal_range(attribute)
            .filter(|&l| self.rules[rule].get(l))
            .collect()
    }

    /// Literals × rules matrix, entry true iff the literal is in the rule.
    pub fn membership(&self) -> BitMatrix {
        self.rule_matrix().transpose()
    }

    /// Rules × literals matrix (the transpose of [`membership`](Self::membership)).
    pub fn rule_matrix(&self) -> BitMatrix {
        BitMatrix::from_bitvecs(self.n_literals(), &self.rules)
    }

    /// First `(rule, attribute)` pair holding more than one literal.
    pub fn first_contradiction(&self) -> Option<(usize, usize)> {
        for j in 0..self.n_rules() {
            for a in 0..self.schema.n_attributes() {
                if self.literals_of_attribute(j, a).len() > 1 {
                    return Some((j, a));
                }
            }
        }
        None
    }

    pub(crate) fn rules_mut(&mut self) -> &mut [BitVec] {
        &mut self.rules
    }
}

/// Rule-set membership, one flag per rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrLayer {
    selected: BitVec,
}

impl OrLayer {
    pub fn all(n_rules: usize) -> Self {
        Self {
            selected: BitVec::ones(n_rules),
        }
    }

    pub fn none(n_rules: usize) -> Self {
        Self {
            selected: BitVec::zeros(n_rules),
        }
    }

    pub fn from_bits(selected: BitVec) -> Self {
        Self { selected }
    }

    pub fn n_rules(&self) -> usize {
        self.selected.len()
    }

    pub fn is_selected(&self, rule: usize) -> bool {
        self.selected.get(rule)
    }

    pub fn bits(&self) -> &BitVec {
        &self.selected
    }

    pub fn selected_rules(&self) -> impl Iterator<Item = usize> + '_ {
        self.selected.iter_ones()
    }

    pub fn n_selected(&self) -> usize {
        self.selected.count_ones()
    }

    pub fn with(&self, rule: usize, selected: bool) -> Self {
        let mut out = self.clone();
        out.selected.set(rule, selected);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleNetwork {
    pub and_layer: AndLayer,
    pub or_layer: OrLayer,
    pub positive_class: String,
    pub negative_class: String,
}

impl RuleNetwork {
    pub fn new(
        and_layer: AndLayer,
        or_layer: OrLayer,
        positive_class: impl Into<String>,
        negative_class: impl Into<String>,
    ) -> Result<Self> {
        if and_layer.n_rules() != or_layer.n_rules() {
            return Err(Error::DimensionMismatch {
                expected: and_layer.n_rules(),
                found: or_layer.n_rules(),
            });
        }
        Ok(Self {
            and_layer,
            or_layer,
            positive_class: positive_class.into(),
            negative_class: negative_class.into(),
        })
    }

    pub fn n_rules(&self) -> usize {
        self.and_layer.n_rules()
    }

    pub fn schema(&self) -> &AttributeSchema {
        self.and_layer.schema()
    }

    pub fn with_and_layer(&self, and_layer: AndLayer) -> Self {
        Self {
            and_layer,
            ..self.clone()
        }
    }

    pub fn with_or_layer(&self, or_layer: OrLayer) -> Self {
        Self {
            or_layer,
            ..self.clone()
        }
    }

    pub fn predict(&self, features: &BitMatrix) -> Result<BitVec> {
        predict(features, self)
    }
}

/// Rule activations, `batch × n_rules`: `¬((¬features) @ membership)`.
///
/// A rule with no literals fires on every instance.
pub fn and_forward(features: &BitMatrix, and_layer: &AndLayer) -> Result<BitMatrix> {
    let inverted = features.not();
    let violated = inverted
        .bool_matmul_transposed(&and_layer.rule_matrix())
        .map_err(|(expected, found)| Error::DimensionMismatch { expected: found, found: expected })?;
    Ok(violated.not())
}

/// Disjunction of the selected rules per instance: `activations @ selected`.
pub fn or_forward(activations: &BitMatrix, or_layer: &OrLayer) -> Result<BitVec> {
    if activations.cols() != or_layer.n_rules() {
        return Err(Error::DimensionMismatch {
            expected: or_layer.n_rules(),
            found: activations.cols(),
        });
    }
    let selected = BitMatrix::from_bitvecs(or_layer.n_rules(), std::slice::from_ref(or_layer.bits()));
    let out = activations
        .bool_matmul_transposed(&selected)
        .expect("widths checked");
    Ok((0..out.rows()).map(|i| out.get(i, 0)).collect())
}

/// Network output per instance; true means the positive (minority) class.
pub fn predict(features: &BitMatrix, network: &RuleNetwork) -> Result<BitVec> {
    or_forward(&and_forward(features, &network.and_layer)?, &network.or_layer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Attribute;

    fn schema() -> Arc<AttributeSchema> {
        Arc::new(
            AttributeSchema::new(vec![
                Attribute::nominal("A", ["a", "b"]),
                Attribute::nominal("B", ["x", "y"]),
            ])
            .unwrap(),
        )
    }

    fn row(s: &AttributeSchema, vals: &[Option<usize>]) -> BitVec {
        s.encode_values(vals).unwrap()
    }

    #[test]
    fn conjunction_semantics() {
        let s = schema();
        // rule 0: A=a AND B=x; rule 1: empty
        let layer = AndLayer::from_literals(s.clone(), &[vec![0, 2], vec![]]).unwrap();
        let x = BitMatrix::from_bitvecs(
            4,
            &[row(&s, &[Some(0), Some(0)]), row(&s, &[Some(0), Some(1)]), row(&s, &[None, None])],
        );
        let act = and_forward(&x, &layer).unwrap();
        assert!(act.get(0, 0));
        assert!(!act.get(1, 0));
        assert!(!act.get(2, 0));
        assert!((0..3).all(|i| act.get(i, 1)));
    }

    #[test]
    fn disjunction_semantics() {
        let acts = BitMatrix::from_rows(3, &[[true, false, true]]);
        let sel = |b: [bool; 3]| OrLayer::from_bits(BitVec::from_bools(b));
        assert!(or_forward(&acts, &sel([false, false, true])).unwrap().get(0));
        let all = BitMatrix::from_rows(3, &[[true, true, true]]);
        assert!(!or_forward(&all, &OrLayer::none(3)).unwrap().get(0));
        let none = BitMatrix::from_rows(3, &[[false, false, false]]);
        assert!(!or_forward(&none, &OrLayer::all(3)).unwrap().get(0));
    }

    #[test]
    fn predict_single_literal_rule() {
        let s = schema();
        let layer = AndLayer::from_literals(s.clone(), &[vec![0]]).unwrap();
        let net = RuleNetwork::new(layer, OrLayer::all(1), "p", "n").unwrap();
        let x = BitMatrix::from_bitvecs(4, &[row(&s, &[Some(0), None]), row(&s, &[Some(1), None])]);
        assert_eq!(predict(&x, &net).unwrap(), BitVec::from_bools([true, false]));
    }

    #[test]
    fn empty_rule_selected_predicts_all_true() {
        let s = schema();
        let net = RuleNetwork::new(AndLayer::empty(s.clone(), 3), OrLayer::all(3), "p", "n").unwrap();
        let x = BitMatrix::from_bitvecs(4, &[row(&s, &[Some(0), Some(1)]), row(&s, &[None, None])]);
        assert_eq!(predict(&x, &net).unwrap().count_ones(), 2);
    }

    #[test]
    fn dimension_checks() {
        let s = schema();
        let layer = AndLayer::empty(s, 2);
        assert!(matches!(
            and_forward(&BitMatrix::zeros(1, 3), &layer),
            Err(Error::DimensionMismatch { expected: 4, found: 3 })
        ));
        assert!(or_forward(&BitMatrix::zeros(1, 3), &OrLayer::all(2)).is_err());
        assert!(RuleNetwork::new(layer, OrLayer::all(3), "p", "n").is_err());
    }

    #[test]
    fn contradictory_rule_rejected() {
        assert!(AndLayer::from_literals(schema(), &[vec![0, 1]]).is_err());
    }
}
