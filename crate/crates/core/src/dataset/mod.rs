//! Loading nominal tabular data and one-hot encoding it into literals.
//!
//! Every attribute `A_i` with `|A_i|` values becomes `|A_i|` binary
//! literals, including two-valued attributes, so that an unknown value can
//! be encoded as all of its literals being false. The positive label is the
//! less frequent class.

mod discretize;
mod schema;
mod split;
mod table;

use std::collections::BTreeMap;
use std::sync::Arc;

use log::warn;
use serde::{Deserialize, Serialize};

pub use discretize::{bin_index, bin_label, discretize, discretize_numeric_columns, quantile_cut_points};
pub use schema::{Attribute, AttributeSchema, EncodeStats};
pub use split::{
    default_batch_size, derive_seed, holdout_split, make_folds, make_stratified_folds, minibatches, FoldPlan,
    MiniBatches,
};
pub(crate) use split::rng;
pub use table::{load_csv, Cell, Column, ColumnKind, IngestOptions, RawTable};

use crate::bits::{BitMatrix, BitVec};
use crate::error::{Error, Result};

/// What a saved model needs to re-encode new data identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMetadata {
    pub label_column: String,
    pub positive_class: String,
    pub negative_class: String,
    pub schema: AttributeSchema,
}

#[derive(Debug, Clone)]
pub struct EncodedDataset {
    schema: Arc<AttributeSchema>,
    features: BitMatrix,
    labels: BitVec,
    label_column: String,
    positive_class: String,
    negative_class: String,
}

impl EncodedDataset {
    pub fn new(
        schema: Arc<AttributeSchema>,
        features: BitMatrix,
        labels: BitVec,
        label_column: impl Into<String>,
        positive_class: impl Into<String>,
        negative_class: impl Into<String>,
    ) -> Result<Self> {
        if features.cols() != schema.n_literals() {
            return Err(Error::DimensionMismatch {
                expected: schema.n_literals(),
                found: features.cols(),
            });
        }
        if features.rows() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: features.rows(),
                found: labels.len(),
            });
        }
        for i in 0..features.rows() {
            for a in 0..schema.n_attributes() {
                if schema.literal_range(a).filter(|&l| features.get(i, l)).count() > 1 {
                    return Err(Error::invalid(format!(
                        "row {i} sets several values of `{}`",
                        schema.attributes()[a].name
                    )));
                }
            }
        }
        Ok(Self {
            schema,
            features,
            labels,
            label_column: label_column.into(),
            positive_class: positive_class.into(),
            negative_class: negative_class.into(),
        })
    }

    /// Builds a dataset from per-instance value indices (`None` = unknown).
    pub fn from_values(
        schema: Arc<AttributeSchema>,
        rows: &[Vec<Option<usize>>],
        labels: &[bool],
    ) -> Result<Self> {
        let encoded = rows
            .iter()
            .map(|r| schema.encode_values(r))
            .collect::<Result<Vec<_>>>()?;
        let features = BitMatrix::from_bitvecs(schema.n_literals(), &encoded);
        Self::new(
            schema,
            features,
            labels.iter().copied().collect(),
            "class",
            "positive",
            "negative",
        )
    }

    /// Encodes `table` against an existing schema and class mapping, e.g. a
    /// holdout split or data scored by a saved model. Rows with an unknown
    /// label are dropped.
    pub fn encode_with(meta: &DatasetMetadata, table: &RawTable) -> Result<(Self, EncodeStats)> {
        let label = table
            .column_index(&meta.label_column)
            .ok_or_else(|| Error::LabelColumnNotFound(meta.label_column.clone()))?;
        let (kept, labels) = map_labels(table, label, &meta.positive_class, &meta.negative_class)?;
        let (features, stats) = meta.schema.encode_table(&kept)?;
        let ds = Self {
            schema: Arc::new(meta.schema.clone()),
            features,
            labels,
            label_column: meta.label_column.clone(),
            positive_class: meta.positive_class.clone(),
            negative_class: meta.negative_class.clone(),
        };
        Ok((ds, stats))
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn schema_arc(&self) -> &Arc<AttributeSchema> {
        &self.schema
    }

    pub fn features(&self) -> &BitMatrix {
        &self.features
    }

    pub fn labels(&self) -> &BitVec {
        &self.labels
    }

    pub fn n_instances(&self) -> usize {
        self.labels.len()
    }

    pub fn n_literals(&self) -> usize {
        self.schema.n_literals()
    }

    pub fn label_column(&self) -> &str {
        &self.label_column
    }

    pub fn positive_class(&self) -> &str {
        &self.positive_class
    }

    pub fn negative_class(&self) -> &str {
        &self.negative_class
    }

    pub fn n_positive(&self) -> usize {
        self.labels.count_ones()
    }

    /// Accuracy of always predicting the more frequent label.
    pub fn majority_fraction(&self) -> f64 {
        let pos = self.n_positive();
        pos.max(self.n_instances() - pos) as f64 / self.n_instances() as f64
    }

    pub fn metadata(&self) -> DatasetMetadata {
        DatasetMetadata {
            label_column: self.label_column.clone(),
            positive_class: self.positive_class.clone(),
            negative_class: self.negative_class.clone(),
            schema: (*self.schema).clone(),
        }
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            schema: Arc::clone(&self.schema),
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels.get(i)).collect(),
            label_column: self.label_column.clone(),
            positive_class: self.positive_class.clone(),
            negative_class: self.negative_class.clone(),
        }
    }

    /// Same data with the class mapping swapped.
    pub fn swap_classes(&self) -> Self {
        Self {
            schema: Arc::clone(&self.schema),
            features: self.features.clone(),
            labels: self.labels.not(),
            label_column: self.label_column.clone(),
            positive_class: self.negative_class.clone(),
            negative_class: self.positive_class.clone(),
        }
    }

    /// Literal-major view: row `l` holds literal `l` for every instance.
    pub fn literal_columns(&self) -> BitMatrix {
        self.features.transpose()
    }
}

fn map_labels(
    table: &RawTable,
    label: usize,
    positive: &str,
    negative: &str,
) -> Result<(RawTable, BitVec)> {
    let mut keep = Vec::with_capacity(table.n_rows());
    let mut labels = Vec::with_capacity(table.n_rows());
    for (i, row) in table.rows().iter().enumerate() {
        match row[label].as_deref() {
            None => {}
            Some(v) if v == positive => {
                keep.push(i);
                labels.push(true);
            }
            Some(v) if v == negative => {
                keep.push(i);
                labels.push(false);
            }
            Some(v) => return Err(Error::UnknownClass(v.to_string())),
        }
    }
    let dropped = table.n_rows() - keep.len();
    if dropped > 0 {
        warn!("dropped {dropped} rows with unknown label");
    }
    Ok((table.select_rows(&keep), labels.into_iter().collect()))
}

/// Column treatment applied before one-hot encoding.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrepareOptions {
    /// Equal-frequency bins for numeric columns. Without it numeric
    /// columns are rejected.
    pub n_bins: Option<usize>,
    /// Columns kept nominal even when every value parses as a number.
    pub nominal: Vec<String>,
}

/// Applies nominal overrides, bins the remaining numeric columns and encodes.
pub fn prepare(table: &RawTable, label_column: &str, options: &PrepareOptions) -> Result<EncodedDataset> {
    if table.column_index(label_column).is_none() {
        return Err(Error::LabelColumnNotFound(label_column.to_string()));
    }
    let mut table = table.clone();
    for name in &options.nominal {
        table.set_kind(name, ColumnKind::Nominal)?;
    }
    if let Some(n_bins) = options.n_bins {
        let (binned_table, binned) = discretize_numeric_columns(&table, &[label_column], n_bins)?;
        if !binned.is_empty() {
            log::info!("binned numeric columns into {n_bins} bins: {}", binned.join(", "));
        }
        table = binned_table;
    }
    encode(&table, label_column)
}

fn distinct_known(table: &RawTable, col: usize) -> Vec<String> {
    let mut values: Vec<String> = table
        .rows()
        .iter()
        .filter_map(|r| r[col].clone())
        .collect();
    values.sort();
    values.dedup();
    values
}

/// One-hot encodes `table`, fixing the schema and the class mapping from it.
///
/// The less frequent class becomes the positive label; on a tie the
/// lexicographically smaller class name is positive. Nominal values are
/// ordered lexicographically, binned values by bin. Attributes with fewer
/// than two known values carry no information and are dropped.
pub fn encode(table: &RawTable, label_column: &str) -> Result<EncodedDataset> {
    let label = table
        .column_index(label_column)
        .ok_or_else(|| Error::LabelColumnNotFound(label_column.to_string()))?;

    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for row in table.rows() {
        if let Some(v) = row[label].as_deref() {
            *counts.entry(v).or_default() += 1;
        }
    }
    if counts.len() != 2 {
        return Err(Error::ClassCount {
            found: counts.len(),
            classes: counts.keys().map(|s| s.to_string()).collect(),
        });
    }
    // BTreeMap order is lexicographic, so `min_by_key` keeps the smaller name on ties.
    let (&positive, _) = counts.iter().min_by_key(|(_, &c)| c).expect("two classes");
    let negative = *counts.keys().find(|&&k| k != positive).expect("two classes");

    let mut attributes = Vec::new();
    for (c, col) in table.columns().iter().enumerate() {
        if c == label {
            continue;
        }
        let attr = match &col.kind {
            ColumnKind::Binned(cuts) => Attribute {
                name: col.name.clone(),
                values: (0..=cuts.len()).map(bin_label).collect(),
                cut_points: Some(cuts.clone()),
            },
            ColumnKind::Auto if table.looks_numeric(c) => {
                return Err(Error::NumericColumn(col.name.clone()));
            }
            ColumnKind::Auto | ColumnKind::Nominal => {
                Attribute::nominal(col.name.clone(), distinct_known(table, c))
            }
        };
        if attr.arity() < 2 {
            warn!(
                "dropping attribute `{}`: {} distinct known value(s)",
                attr.name,
                attr.arity()
            );
            continue;
        }
        attributes.push(attr);
    }
    let meta = DatasetMetadata {
        label_column: label_column.to_string(),
        positive_class: positive.to_string(),
        negative_class: negative.to_string(),
        schema: AttributeSchema::new(attributes)?,
    };
    let (ds, _) = EncodedDataset::encode_with(&meta, table)?;
    Ok(ds)
}
