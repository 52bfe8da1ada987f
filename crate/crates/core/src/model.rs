//! JSON model files: the schema needed to re-encode data, the rules as
//! attribute/value pairs, and the OR-layer selection.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::boolnet::{AndLayer, OrLayer, RuleNetwork};
use crate::bits::BitVec;
use crate::dataset::{AttributeSchema, DatasetMetadata};
use crate::error::{Error, Result};
use crate::trainer::TrainConfig;

pub const MODEL_FORMAT: &str = "rulenet-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LiteralRef {
    pub attribute: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingInfo {
    pub config: TrainConfig,
    pub n_instances: usize,
    pub train_accuracy: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    format: String,
    version: u32,
    label_column: String,
    positive_class: String,
    negative_class: String,
    schema: AttributeSchema,
    rules: Vec<Vec<LiteralRef>>,
    selected: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    training: Option<TrainingInfo>,
}

/// A trained network plus what is needed to apply it to raw tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub network: RuleNetwork,
    pub label_column: String,
    pub training: Option<TrainingInfo>,
}

impl Model {
    pub fn new(network: RuleNetwork, label_column: impl Into<String>, training: Option<TrainingInfo>) -> Self {
        Self {
            network,
            label_column: label_column.into(),
            training,
        }
    }

    pub fn schema(&self) -> &AttributeSchema {
        self.network.schema()
    }

    pub fn metadata(&self) -> DatasetMetadata {
        DatasetMetadata {
            label_column: self.label_column.clone(),
            positive_class: self.network.positive_class.clone(),
            negative_class: self.network.negative_class.clone(),
            schema: self.schema().clone(),
        }
    }

    fn to_doc(&self) -> ModelDoc {
        let and = &self.network.and_layer;
        let schema = and.schema();
        let rules = (0..and.n_rules())
            .map(|j| {
                and.literals(j)
                    .map(|l| {
                        let (attribute, value) = schema.describe(l);
                        LiteralRef {
                            attribute: attribute.to_string(),
                            value: value.to_string(),
                        }
                    })
                    .collect()
            })
            .collect();
        ModelDoc {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            label_column: self.label_column.clone(),
            positive_class: self.network.positive_class.clone(),
            negative_class: self.network.negative_class.clone(),
            schema: schema.clone(),
            rules,
            selected: self.network.or_layer.selected_rules().collect(),
            training: self.training.clone(),
        }
    }

    fn from_doc(doc: ModelDoc) -> Result<Self> {
        if doc.format != MODEL_FORMAT {
            return Err(Error::Model(format!("unknown format `{}`", doc.format)));
        }
        if doc.version != MODEL_VERSION {
            return Err(Error::Model(format!("unsupported version {}", doc.version)));
        }
        let schema = Arc::new(doc.schema);
        let rules = doc
            .rules
            .iter()
            .enumerate()
            .map(|(j, lits)| {
                lits.iter()
                    .map(|r| {
                        schema.find_literal(&r.attribute, &r.value).ok_or_else(|| {
                            Error::Model(format!(
                                "rule {j}: `{}={}` is not in the schema",
                                r.attribute, r.value
                            ))
                        })
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let and = AndLayer::from_literals(schema, &rules)?;
        let mut selected = BitVec::zeros(and.n_rules());
        for &j in &doc.selected {
            if j >= and.n_rules() {
                return Err(Error::Model(format!(
                    "selected rule {j} out of range (have {})",
                    and.n_rules()
                )));
            }
            selected.set(j, true);
        }
        let network = RuleNetwork::new(and, OrLayer::from_bits(selected), doc.positive_class, doc.negative_class)?;
        Ok(Self {
            network,
            label_column: doc.label_column,
            training: doc.training,
        })
    }

    /// Pretty JSON with a trailing newline. Identical models give identical bytes.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.to_doc())?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDoc = serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        Self::from_doc(doc)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| match source.kind() {
            std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
            _ => Error::Io {
                path: path.to_path_buf(),
                source,
            },
        })?;
        Self::from_json(&text)
    }
}
