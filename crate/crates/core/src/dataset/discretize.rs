//! Equal-frequency binning of numeric columns into nominal bin labels.

use super::table::{ColumnKind, RawTable};
use crate::error::{Error, Result};

pub fn bin_label(bin: usize) -> String {
    format!("q{}", bin + 1)
}

/// Bin of `x` given ascending cut points: bin `i` holds `cuts[i-1] < x <= cuts[i]`.
pub fn bin_index(cuts: &[f64], x: f64) -> usize {
    cuts.partition_point(|&c| c < x)
}

/// Cut points at the `i·n/n_bins`-th order statistics (i = 1..n_bins).
///
/// Repeated cut points collapse, and a cut at the maximum is dropped, so
/// every resulting bin is non-empty on `values`.
pub fn quantile_cut_points(values: &[f64], n_bins: usize) -> Vec<f64> {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let Some(&max) = sorted.last() else {
        return Vec::new();
    };
    let mut cuts: Vec<f64> = Vec::with_capacity(n_bins.saturating_sub(1));
    for i in 1..n_bins {
        let rank = i * n / n_bins;
        if rank == 0 {
            continue;
        }
        let c = sorted[rank - 1];
        if c < max && cuts.last() != Some(&c) {
            cuts.push(c);
        }
    }
    cuts
}

/// Replaces `column` by equal-frequency bin labels `q1..qk` computed on this
/// table. Unknown cells stay unknown.
pub fn discretize(table: &RawTable, column: &str, n_bins: usize) -> Result<RawTable> {
    if n_bins < 2 {
        return Err(Error::invalid(format!("n_bins must be at least 2, got {n_bins}")));
    }
    let idx = table
        .column_index(column)
        .ok_or_else(|| Error::ColumnNotFound(column.to_string()))?;
    let mut values = Vec::with_capacity(table.n_rows());
    for (r, row) in table.rows().iter().enumerate() {
        if let Some(v) = &row[idx] {
            values.push(v.parse::<f64>().map_err(|_| Error::NotNumeric {
                column: column.to_string(),
                row: r + 1,
                value: v.clone(),
            })?);
        }
    }
    let cuts = quantile_cut_points(&values, n_bins);

    let mut out = table.clone();
    let (col, cells) = out.column_mut(idx);
    col.kind = ColumnKind::Binned(cuts.clone());
    let mut parsed = values.into_iter();
    for v in cells.flatten() {
        let x = parsed.next().expect("one parsed value per known cell");
        *v = bin_label(bin_index(&cuts, x));
    }
    Ok(out)
}

/// Discretizes every column other than `skip` that is still `Auto` and
/// whose known cells are all numeric. Returns the names of the columns
/// that were binned.
pub fn discretize_numeric_columns(
    table: &RawTable,
    skip: &[&str],
    n_bins: usize,
) -> Result<(RawTable, Vec<String>)> {
    let mut out = table.clone();
    let mut binned = Vec::new();
    for (i, col) in table.columns().iter().enumerate() {
        if skip.contains(&col.name.as_str()) || col.kind != ColumnKind::Auto {
            continue;
        }
        if table.looks_numeric(i) {
            out = discretize(&out, &col.name, n_bins)?;
            binned.push(col.name.clone());
        }
    }
    Ok((out, binned))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_column(values: &[Option<&str>]) -> RawTable {
        RawTable::new(
            vec!["x".into()],
            values.iter().map(|v| vec![v.map(str::to_string)]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn quartiles_of_1_to_100() {
        let cells: Vec<String> = (1..=100).rev().map(|i| i.to_string()).collect();
        let t = one_column(&cells.iter().map(|s| Some(s.as_str())).collect::<Vec<_>>());
        let d = discretize(&t, "x", 4).unwrap();
        assert_eq!(
            d.columns()[0].kind,
            ColumnKind::Binned(vec![25.0, 50.0, 75.0])
        );

        // Oracle: sort, cut into four equal-count groups, label each group.
        let mut sorted: Vec<i32> = (1..=100).rev().collect();
        sorted.sort();
        let expected_bin = |v: i32| sorted.iter().position(|&s| s == v).unwrap() / 25;
        let mut counts = [0usize; 4];
        for (r, raw) in t.rows().iter().enumerate() {
            let v: i32 = raw[0].as_deref().unwrap().parse().unwrap();
            let got = d.cell(r, 0).unwrap();
            assert_eq!(got, bin_label(expected_bin(v)));
            counts[expected_bin(v)] += 1;
        }
        assert_eq!(counts, [25; 4]);
    }

    #[test]
    fn constant_column_collapses_to_one_bin() {
        let t = one_column(&[Some("7"), Some("7"), Some("7"), Some("7")]);
        let d = discretize(&t, "x", 2).unwrap();
        assert_eq!(d.columns()[0].kind, ColumnKind::Binned(vec![]));
        assert!(d.rows().iter().all(|r| r[0].as_deref() == Some("q1")));
    }

    #[test]
    fn unknown_passes_through() {
        let t = one_column(&[Some("1"), None, Some("3")]);
        let d = discretize(&t, "x", 2).unwrap();
        assert_eq!(d.cell(1, 0), None);
        assert_eq!(d.cell(0, 0), Some("q1"));
        assert_eq!(d.cell(2, 0), Some("q2"));
    }

    #[test]
    fn rejects_non_numeric_and_small_bin_counts() {
        let t = one_column(&[Some("1"), Some("abc")]);
        assert!(matches!(
            discretize(&t, "x", 2),
            Err(Error::NotNumeric { row: 2, .. })
        ));
        let t = one_column(&[Some("1"), Some("2")]);
        assert!(matches!(discretize(&t, "x", 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn skewed_column_keeps_non_empty_bins() {
        // Mostly zeros, as in capital-gain style columns.
        let mut vals = vec![0.0; 90];
        vals.extend((1..=10).map(f64::from));
        let cuts = quantile_cut_points(&vals, 4);
        assert_eq!(cuts, vec![0.0]);
        assert_eq!(bin_index(&cuts, 0.0), 0);
        assert_eq!(bin_index(&cuts, 3.0), 1);
    }
}
