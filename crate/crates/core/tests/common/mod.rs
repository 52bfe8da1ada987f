#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;
use rulenet_core::boolnet::{AndLayer, OrLayer, RuleNetwork};
use rulenet_core::dataset::{Attribute, AttributeSchema, EncodedDataset};
use rulenet_core::BitVec;

/// Rules as literal sets over a flat literal space.
#[derive(Debug, Clone)]
pub struct NaiveDnf {
    pub rules: Vec<BTreeSet<usize>>,
    pub selected: Vec<bool>,
}

impl NaiveDnf {
    pub fn from_network(net: &RuleNetwork) -> Self {
        Self {
            rules: (0..net.n_rules())
                .map(|j| net.and_layer.literals(j).collect())
                .collect(),
            selected: (0..net.n_rules()).map(|j| net.or_layer.is_selected(j)).collect(),
        }
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        self.rules
            .iter()
            .zip(&self.selected)
            .any(|(r, &s)| s && r.iter().all(|&l| x[l]))
    }

    pub fn correct(&self, rows: &[Vec<bool>], labels: &[bool]) -> usize {
        rows.iter().zip(labels).filter(|(x, &y)| self.eval(x) == y).count()
    }
}

pub fn random_schema(rng: &mut impl Rng, max_attrs: usize, max_arity: usize) -> Arc<AttributeSchema> {
    let n = rng.random_range(1..=max_attrs);
    let attrs = (0..n)
        .map(|a| {
            let k = rng.random_range(2..=max_arity);
            Attribute::nominal(format!("a{a}"), (0..k).map(|v| format!("v{v}")))
        })
        .collect();
    Arc::new(AttributeSchema::new(attrs).unwrap())
}

/// Literal index ranges per attribute, from the arities alone.
pub fn attribute_ranges(schema: &AttributeSchema) -> Vec<std::ops::Range<usize>> {
    let mut start = 0;
    schema
        .attributes()
        .iter()
        .map(|a| {
            let r = start..start + a.arity();
            start = r.end;
            r
        })
        .collect()
}

pub fn random_rules(rng: &mut impl Rng, schema: &AttributeSchema, n_rules: usize, p: f64) -> Vec<Vec<usize>> {
    let ranges = attribute_ranges(schema);
    (0..n_rules)
        .map(|_| {
            let mut lits = Vec::new();
            for r in &ranges {
                if rng.random_bool(p) {
                    lits.push(rng.random_range(r.clone()));
                }
            }
            lits
        })
        .collect()
}

pub fn random_network(rng: &mut impl Rng, schema: &Arc<AttributeSchema>, max_rules: usize) -> RuleNetwork {
    let n_rules = rng.random_range(1..=max_rules);
    let rules = random_rules(rng, schema, n_rules, 0.4);
    let and = AndLayer::from_literals(schema.clone(), &rules).unwrap();
    let or = OrLayer::from_bits((0..n_rules).map(|_| rng.random_bool(0.7)).collect::<BitVec>());
    RuleNetwork::new(and, or, "pos", "neg").unwrap()
}

pub fn random_dataset(rng: &mut impl Rng, schema: &Arc<AttributeSchema>, n: usize) -> EncodedDataset {
    let rows: Vec<Vec<Option<usize>>> = (0..n)
        .map(|_| {
            schema
                .attributes()
                .iter()
                .map(|a| rng.random_bool(0.9).then(|| rng.random_range(0..a.arity())))
                .collect()
        })
        .collect();
    let labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.4)).collect();
    EncodedDataset::from_values(schema.clone(), &rows, &labels).unwrap()
}

pub fn rows_of(data: &EncodedDataset) -> (Vec<Vec<bool>>, Vec<bool>) {
    let f = data.features();
    let rows = (0..f.rows())
        .map(|i| (0..f.cols()).map(|l| f.get(i, l)).collect())
        .collect();
    (rows, data.labels().iter().collect())
}
