//! Synthetic data for the benchmarks.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rulenet_core::dataset::{Attribute, AttributeSchema, EncodedDataset};
use rulenet_core::trainer::{init_and_layer, init_or_layer, TrainConfig};
use rulenet_core::RuleNetwork;

pub fn schema(n_attributes: usize, arity: usize) -> Arc<AttributeSchema> {
    let attrs = (0..n_attributes)
        .map(|a| Attribute::nominal(format!("a{a}"), (0..arity).map(|v| format!("v{v}"))))
        .collect();
    Arc::new(AttributeSchema::new(attrs).expect("valid schema"))
}

/// Uniform random values, 5% unknown; the label is `a0=v0 OR (a1=v1 AND a2=v2)`.
pub fn dataset(n_instances: usize, n_attributes: usize, arity: usize, seed: u64) -> EncodedDataset {
    assert!(n_attributes >= 3);
    let schema = schema(n_attributes, arity);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<Option<usize>>> = (0..n_instances)
        .map(|_| {
            (0..n_attributes)
                .map(|_| (!rng.random_bool(0.05)).then(|| rng.random_range(0..arity)))
                .collect()
        })
        .collect();
    let labels: Vec<bool> = rows
        .iter()
        .map(|r| r[0] == Some(0) || (r[1] == Some(1) && r[2] == Some(2)))
        .collect();
    EncodedDataset::from_values(schema, &rows, &labels).expect("consistent rows")
}

/// A freshly initialised network as training would start it.
pub fn network(data: &EncodedDataset, n_rules: usize, seed: u64) -> RuleNetwork {
    let config = TrainConfig {
        n_rules,
        ..TrainConfig::default()
    };
    let and = init_and_layer(data.schema_arc(), &config, &mut ChaCha8Rng::seed_from_u64(seed));
    RuleNetwork::new(and, init_or_layer(n_rules), data.positive_class(), data.negative_class())
        .expect("matching layers")
}
