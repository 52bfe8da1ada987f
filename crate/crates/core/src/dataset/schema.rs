use std::collections::HashMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::discretize::bin_index;
use super::table::RawTable;
use crate::bits::{BitMatrix, BitVec};
use crate::error::{Error, Result};

/// A nominal attribute and its ordered values. Attributes produced by
/// binning a numeric column also carry the cut points, so raw numbers can
/// be mapped to the same bins later.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub values: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut_points: Option<Vec<f64>>,
}

impl Attribute {
    pub fn nominal(name: impl Into<String>, values: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self {
            name: name.into(),
            values: values.into_iter().map(Into::into).collect(),
            cut_points: None,
        }
    }

    pub fn arity(&self) -> usize {
        self.values.len()
    }
}

#[derive(Serialize, Deserialize)]
struct SchemaDoc {
    attributes: Vec<Attribute>,
}

/// Ordered attributes and the literal index space they induce: attribute
/// `i` owns the contiguous literal range `literal_range(i)`, one literal per
/// value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SchemaDoc", into = "SchemaDoc")]
pub struct AttributeSchema {
    attributes: Vec<Attribute>,
    offsets: Vec<usize>,
    literal_attr: Vec<usize>,
}

impl TryFrom<SchemaDoc> for AttributeSchema {
    type Error = Error;

    fn try_from(doc: SchemaDoc) -> Result<Self> {
        AttributeSchema::new(doc.attributes)
    }
}

impl From<AttributeSchema> for SchemaDoc {
    fn from(s: AttributeSchema) -> Self {
        SchemaDoc {
            attributes: s.attributes,
        }
    }
}

impl AttributeSchema {
    pub fn new(attributes: Vec<Attribute>) -> Result<Self> {
        let mut offsets = Vec::with_capacity(attributes.len() + 1);
        let mut literal_attr = Vec::new();
        let mut names = std::collections::HashSet::new();
        offsets.push(0);
        for (i, a) in attributes.iter().enumerate() {
            if !names.insert(a.name.as_str()) {
                return Err(Error::invalid(format!("duplicate attribute `{}`", a.name)));
            }
            if a.arity() < 2 {
                return Err(Error::invalid(format!(
                    "attribute `{}` needs at least 2 values, has {}",
                    a.name,
                    a.arity()
                )));
            }
            let distinct: std::collections::HashSet<&str> =
                a.values.iter().map(String::as_str).collect();
            if distinct.len() != a.arity() {
                return Err(Error::invalid(format!("attribute `{}` repeats a value", a.name)));
            }
            if let Some(cuts) = &a.cut_points {
                if cuts.len() + 1 != a.arity() {
                    return Err(Error::invalid(format!(
                        "attribute `{}`: {} cut points for {} bins",
                        a.name,
                        cuts.len(),
                        a.arity()
                    )));
                }
            }
            literal_attr.extend(std::iter::repeat_n(i, a.arity()));
            offsets.push(literal_attr.len());
        }
        Ok(Self {
            attributes,
            offsets,
            literal_attr,
        })
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn n_literals(&self) -> usize {
        self.literal_attr.len()
    }

    pub fn literal_range(&self, attribute: usize) -> Range<usize> {
        self.offsets[attribute]..self.offsets[attribute + 1]
    }

    pub fn attribute_of(&self, literal: usize) -> usize {
        self.literal_attr[literal]
    }

    pub fn literal(&self, attribute: usize, value: usize) -> usize {
        debug_assert!(value < self.attributes[attribute].arity());
        self.offsets[attribute] + value
    }

    /// `(attribute name, value name)` of a literal.
    pub fn describe(&self, literal: usize) -> (&str, &str) {
        let a = self.literal_attr[literal];
        let attr = &self.attributes[a];
        (&attr.name, &attr.values[literal - self.offsets[a]])
    }

    pub fn find_literal(&self, attribute: &str, value: &str) -> Option<usize> {
        let a = self.attributes.iter().position(|x| x.name == attribute)?;
        let v = self.attributes[a].values.iter().position(|x| x == value)?;
        Some(self.literal(a, v))
    }

    /// Inverse of the one-hot encoding: the known value index per attribute.
    pub fn decode_row(&self, row: &BitVec) -> Vec<Option<usize>> {
        (0..self.n_attributes())
            .map(|a| {
                let r = self.literal_range(a);
                r.clone().find(|&l| row.get(l)).map(|l| l - r.start)
            })
            .collect()
    }

    /// One-hot encodes value indices (`None` = unknown) into a literal row.
    pub fn encode_values(&self, values: &[Option<usize>]) -> Result<BitVec> {
        if values.len() != self.n_attributes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_attributes(),
                found: values.len(),
            });
        }
        let mut row = BitVec::zeros(self.n_literals());
        for (a, v) in values.iter().enumerate() {
            if let Some(v) = *v {
                if v >= self.attributes[a].arity() {
                    return Err(Error::invalid(format!(
                        "value index {v} out of range for `{}`",
                        self.attributes[a].name
                    )));
                }
                row.set(self.literal(a, v), true);
            }
        }
        Ok(row)
    }

    /// One-hot encodes the rows of `table`, locating attributes by column
    /// name. Values the schema has never seen encode as unknown.
    pub fn encode_table(&self, table: &RawTable) -> Result<(BitMatrix, EncodeStats)> {
        let mut missing = Vec::new();
        let cols: Vec<usize> = self
            .attributes
            .iter()
            .filter_map(|a| {
                let c = table.column_index(&a.name);
                if c.is_none() {
                    missing.push(a.name.clone());
                }
                c
            })
            .collect();
        if !missing.is_empty() {
            return Err(Error::SchemaMismatch(missing));
        }
        let lookups: Vec<HashMap<&str, usize>> = self
            .attributes
            .iter()
            .map(|a| a.values.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect())
            .collect();

        let mut stats = EncodeStats::default();
        let mut features = BitMatrix::zeros(table.n_rows(), self.n_literals());
        for (r, row) in table.rows().iter().enumerate() {
            for (a, (&c, attr)) in cols.iter().zip(&self.attributes).enumerate() {
                let Some(cell) = row[c].as_deref() else {
                    stats.unknown_cells += 1;
                    continue;
                };
                let value = match &attr.cut_points {
                    // Already-binned labels are accepted as well as raw numbers.
                    Some(cuts) => lookups[a]
                        .get(cell)
                        .copied()
                        .or_else(|| cell.parse::<f64>().ok().map(|x| bin_index(cuts, x))),
                    None => lookups[a].get(cell).copied(),
                };
                match value {
                    Some(v) => features.set(r, self.literal(a, v), true),
                    None => stats.unseen_values += 1,
                }
            }
        }
        Ok((features, stats))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EncodeStats {
    /// Cells holding the missing-value token.
    pub unknown_cells: usize,
    /// Cells whose value is not in the schema; encoded as unknown.
    pub unseen_values: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema() -> AttributeSchema {
        AttributeSchema::new(vec![
            Attribute::nominal("A", ["a", "b", "c"]),
            Attribute::nominal("B", ["x", "y"]),
        ])
        .unwrap()
    }

    #[test]
    fn literal_layout() {
        let s = schema();
        assert_eq!(s.n_literals(), 5);
        assert_eq!(s.literal_range(1), 3..5);
        assert_eq!(s.attribute_of(4), 1);
        assert_eq!(s.describe(1), ("A", "b"));
        assert_eq!(s.find_literal("B", "y"), Some(4));
        assert_eq!(s.find_literal("B", "z"), None);
    }

    #[test]
    fn invariants_enforced() {
        assert!(AttributeSchema::new(vec![Attribute::nominal("A", ["a"])]).is_err());
        assert!(AttributeSchema::new(vec![Attribute::nominal("A", ["a", "a"])]).is_err());
        assert!(AttributeSchema::new(vec![
            Attribute::nominal("A", ["a", "b"]),
            Attribute::nominal("A", ["c", "d"]),
        ])
        .is_err());
    }

    #[test]
    fn json_roundtrip_preserves_order() {
        let s = schema();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(
            json,
            r#"{"attributes":[{"name":"A","values":["a","b","c"]},{"name":"B","values":["x","y"]}]}"#
        );
        let back: AttributeSchema = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<AttributeSchema>(
            r#"{"attributes":[{"name":"A","values":["a"]}]}"#
        )
        .is_err());
    }

    #[test]
    fn encodes_by_column_name_and_counts_unseen() {
        let t = RawTable::new(
            vec!["B".into(), "A".into()],
            vec![
                vec![Some("y".into()), Some("b".into())],
                vec![None, Some("q".into())],
            ],
        )
        .unwrap();
        let (m, stats) = schema().encode_table(&t).unwrap();
        assert_eq!(m.row(0), BitVec::from_bools([false, true, false, false, true]));
        assert_eq!(m.row(1), BitVec::zeros(5));
        assert_eq!(stats, EncodeStats { unknown_cells: 1, unseen_values: 1 });
    }

    #[test]
    fn missing_columns_listed() {
        let t = RawTable::new(vec!["C".into()], vec![]).unwrap();
        match schema().encode_table(&t) {
            Err(Error::SchemaMismatch(cols)) => assert_eq!(cols, ["A", "B"]),
            other => panic!("{other:?}"),
        }
    }
}
