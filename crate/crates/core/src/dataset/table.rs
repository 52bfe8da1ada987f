use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// A cell is `None` when the value is unknown.
pub type Cell = Option<String>;

#[derive(Debug, Clone)]
pub struct IngestOptions {
    /// Token that marks a missing value. Matched after trimming whitespace.
    pub missing_token: String,
    pub delimiter: u8,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            missing_token: "?".to_string(),
            delimiter: b',',
        }
    }
}

/// How `encode` should treat a column.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnKind {
    /// Nominal unless every known cell parses as a number, which is an error.
    Auto,
    /// Declared nominal, even if the cells look numeric.
    Nominal,
    /// Replaced by bin labels; holds the cut points the bins came from.
    Binned(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

/// Text cells with named columns, as read from a CSV file.
#[derive(Debug, Clone, Default)]
pub struct RawTable {
    columns: Vec<Column>,
    rows: Vec<Vec<Cell>>,
}

impl RawTable {
    pub fn new(names: Vec<String>, rows: Vec<Vec<Cell>>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != names.len() {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    expected: names.len(),
                    found: row.len(),
                });
            }
        }
        let columns = names
            .into_iter()
            .map(|name| Column {
                name,
                kind: ColumnKind::Auto,
            })
            .collect();
        Ok(Self { columns, rows })
    }

    /// Reads a CSV document with a header row. An empty document yields an
    /// empty table with no columns.
    pub fn from_reader<R: Read>(reader: R, options: &IngestOptions) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .delimiter(options.delimiter)
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let names: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != names.len() {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    expected: names.len(),
                    found: record.len(),
                });
            }
            rows.push(
                record
                    .iter()
                    .map(|c| (c != options.missing_token).then(|| c.to_string()))
                    .collect(),
            );
        }
        if names.is_empty() || (names.len() == 1 && names[0].is_empty()) {
            return Ok(Self::default());
        }
        Self::new(names, rows)
    }

    pub fn read(path: impl AsRef<Path>, options: &IngestOptions) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
            _ => Error::Io {
                path: path.to_path_buf(),
                source: e,
            },
        })?;
        Self::from_reader(std::io::BufReader::new(file), options)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<&str> {
        self.rows[row][col].as_deref()
    }

    pub fn set_kind(&mut self, name: &str, kind: ColumnKind) -> Result<()> {
        let idx = self
            .column_index(name)
            .ok_or_else(|| Error::ColumnNotFound(name.to_string()))?;
        self.columns[idx].kind = kind;
        Ok(())
    }

    pub(crate) fn column_mut(&mut self, idx: usize) -> (&mut Column, impl Iterator<Item = &mut Cell>) {
        let col = &mut self.columns[idx];
        (col, self.rows.iter_mut().map(move |r| &mut r[idx]))
    }

    /// Rows selected by `indices`, in order, keeping column metadata.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        Self {
            columns: self.columns.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// True iff every known cell of the column parses as a number and at
    /// least one cell is known.
    pub fn looks_numeric(&self, col: usize) -> bool {
        let mut seen = false;
        for row in &self.rows {
            if let Some(v) = &row[col] {
                if v.parse::<f64>().is_err() {
                    return false;
                }
                seen = true;
            }
        }
        seen
    }
}

/// Reads a CSV file and checks that `label_column` is present.
pub fn load_csv(
    path: impl AsRef<Path>,
    label_column: &str,
    options: &IngestOptions,
) -> Result<RawTable> {
    let table = RawTable::read(path, options)?;
    if table.column_index(label_column).is_none() {
        return Err(Error::LabelColumnNotFound(label_column.to_string()));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CSV: &str = "a,b,label\nx,1,p\ny,?,n\nx,3,n\nz,4,p\ny,5,n\n";

    #[test]
    fn parses_header_and_rows() {
        let t = RawTable::from_reader(CSV.as_bytes(), &IngestOptions::default()).unwrap();
        assert_eq!(t.n_rows(), 5);
        assert_eq!(t.n_columns(), 3);
        assert_eq!(t.column_names().collect::<Vec<_>>(), ["a", "b", "label"]);
        assert_eq!(t.cell(0, 0), Some("x"));
    }

    #[test]
    fn missing_token_becomes_unknown() {
        let t = RawTable::from_reader(CSV.as_bytes(), &IngestOptions::default()).unwrap();
        assert_eq!(t.cell(1, 1), None);
        let opts = IngestOptions {
            missing_token: "NA".into(),
            ..Default::default()
        };
        let t = RawTable::from_reader(CSV.as_bytes(), &opts).unwrap();
        assert_eq!(t.cell(1, 1), Some("?"));
    }

    #[test]
    fn label_column_must_exist() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        std::fs::write(&p, CSV).unwrap();
        assert!(load_csv(&p, "label", &IngestOptions::default()).is_ok());
        let err = load_csv(&p, "class", &IngestOptions::default()).unwrap_err();
        assert!(matches!(err, Error::LabelColumnNotFound(ref c) if c == "class"));
        assert!(err.to_string().contains("label column not found"));
    }

    #[test]
    fn missing_file_is_reported() {
        let err = load_csv("/nonexistent/x.csv", "y", &IngestOptions::default()).unwrap_err();
        assert!(matches!(err, Error::MissingFile(_)));
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let err = RawTable::from_reader("a,b\n1,2\n3\n".as_bytes(), &IngestOptions::default())
            .unwrap_err();
        assert!(matches!(
            err,
            Error::RaggedRow {
                row: 2,
                expected: 2,
                found: 1
            }
        ));
    }

    #[test]
    fn empty_document_is_empty_table() {
        let t = RawTable::from_reader("".as_bytes(), &IngestOptions::default()).unwrap();
        assert_eq!(t.n_rows(), 0);
        assert_eq!(t.n_columns(), 0);
    }
}
