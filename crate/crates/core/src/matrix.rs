//! Workload-matrix data model, CSV ingestion, and block-diagonal permutation.
//!
//! A [`WorkloadMatrix`] is a dense machines x parts matrix of operation
//! times: rows are machines, columns are parts, and a zero entry means the
//! part never visits the machine. A [`CellConfiguration`] assigns every
//! machine and every part to one of `c` cells; permuting a matrix by a
//! configuration groups the cells into diagonal blocks for display.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense machines x parts matrix of operation times, row-major by machine.
///
/// Values are validated non-negative and finite on construction. The CSV
/// loader additionally requires values in [0, 1] (or `normalize`) and a
/// nonzero entry in every row and column, since clustering is ill-posed
/// otherwise; programmatic construction leaves those checks to the caller
/// so that degenerate matrices remain expressible in tests and metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadMatrix {
    machines: usize,
    parts: usize,
    values: Vec<f64>,
    machine_labels: Vec<String>,
    part_labels: Vec<String>,
}

impl WorkloadMatrix {
    /// Builds a matrix from row-major values with default `m1..`/`p1..` labels.
    pub fn new(machines: usize, parts: usize, values: Vec<f64>) -> Result<Self> {
        if machines == 0 || parts == 0 {
            return Err(Error::EmptyMatrix);
        }
        if values.len() != machines * parts {
            return Err(Error::dim(format!(
                "expected {} values for a {machines}x{parts} matrix, got {}",
                machines * parts,
                values.len()
            )));
        }
        let machine_labels = (1..=machines).map(|i| format!("m{i}")).collect();
        let part_labels = (1..=parts).map(|j| format!("p{j}")).collect();
        let m = Self {
            machines,
            parts,
            values,
            machine_labels,
            part_labels,
        };
        for i in 0..machines {
            for j in 0..parts {
                let v = m.value(i, j);
                if !v.is_finite() {
                    return Err(Error::NonNumeric {
                        row: i + 1,
                        col: j + 1,
                        value: v.to_string(),
                    });
                }
                if v < 0.0 {
                    return Err(Error::NegativeValue {
                        machine: m.machine_labels[i].clone(),
                        part: m.part_labels[j].clone(),
                        value: v,
                    });
                }
            }
        }
        Ok(m)
    }

    /// Replaces the display labels. Lengths must match the dimensions.
    pub fn with_labels(
        mut self,
        machine_labels: Vec<String>,
        part_labels: Vec<String>,
    ) -> Result<Self> {
        if machine_labels.len() != self.machines || part_labels.len() != self.parts {
            return Err(Error::dim(format!(
                "labels ({} machines, {} parts) do not match matrix ({}x{})",
                machine_labels.len(),
                part_labels.len(),
                self.machines,
                self.parts
            )));
        }
        self.machine_labels = machine_labels;
        self.part_labels = part_labels;
        Ok(self)
    }

    pub fn machine_count(&self) -> usize {
        self.machines
    }

    pub fn part_count(&self) -> usize {
        self.parts
    }

    #[inline]
    pub fn value(&self, machine: usize, part: usize) -> f64 {
        self.values[machine * self.parts + part]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, machine: usize) -> &[f64] {
        &self.values[machine * self.parts..(machine + 1) * self.parts]
    }

    pub fn column(&self, part: usize) -> Vec<f64> {
        (0..self.machines).map(|i| self.value(i, part)).collect()
    }

    pub fn machine_labels(&self) -> &[String] {
        &self.machine_labels
    }

    pub fn part_labels(&self) -> &[String] {
        &self.part_labels
    }

    /// Grand total of all operation times.
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn nonzero_count(&self) -> usize {
        self.values.iter().filter(|&&v| v > 0.0).count()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Loads a matrix from a CSV file.
    ///
    /// The file is a rectangular numeric CSV with comma separators and `.`
    /// decimals. An optional header row of part labels and an optional first
    /// column of machine labels are auto-detected: any cell in row 0 that
    /// fails numeric parsing marks row 0 as a header, and any remaining cell
    /// in column 0 that fails marks column 0 as labels.
    ///
    /// Values must lie in [0, 1]. When `normalize` is set and the maximum
    /// value exceeds 1, every value is divided by that maximum; without the
    /// flag such a file is rejected. Every machine and every part must have
    /// at least one nonzero entry.
    pub fn load_csv(path: impl AsRef<Path>, normalize: bool) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_csv(&text, normalize)
    }

    /// Parses CSV text with the same rules as [`WorkloadMatrix::load_csv`].
    pub fn parse_csv(text: &str, normalize: bool) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut rows: Vec<Vec<String>> = Vec::new();
        for (idx, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Csv {
                row: idx + 1,
                message: e.to_string(),
            })?;
            rows.push(record.iter().map(str::to_owned).collect());
        }
        if rows.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let width = rows[0].len();
        for (idx, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::RaggedRow {
                    row: idx + 1,
                    found: row.len(),
                    expected: width,
                });
            }
        }

        let parses = |cell: &str| cell.parse::<f64>().is_ok();
        let has_header = rows[0].iter().any(|c| !parses(c));
        let data_start = usize::from(has_header);
        if rows.len() == data_start {
            return Err(Error::EmptyMatrix);
        }
        let has_label_col = rows[data_start..].iter().any(|r| !parses(&r[0]));
        let col_start = usize::from(has_label_col);
        if width == col_start {
            return Err(Error::EmptyMatrix);
        }

        let machines = rows.len() - data_start;
        let parts = width - col_start;
        let part_labels: Vec<String> = if has_header {
            rows[0][col_start..].to_vec()
        } else {
            (1..=parts).map(|j| format!("p{j}")).collect()
        };
        let machine_labels: Vec<String> = if has_label_col {
            rows[data_start..].iter().map(|r| r[0].clone()).collect()
        } else {
            (1..=machines).map(|i| format!("m{i}")).collect()
        };

        let mut values = Vec::with_capacity(machines * parts);
        for (i, row) in rows[data_start..].iter().enumerate() {
            for (j, cell) in row[col_start..].iter().enumerate() {
                let v: f64 = cell.parse().map_err(|_| Error::NonNumeric {
                    row: data_start + i + 1,
                    col: col_start + j + 1,
                    value: cell.clone(),
                })?;
                if !v.is_finite() {
                    return Err(Error::NonNumeric {
                        row: data_start + i + 1,
                        col: col_start + j + 1,
                        value: cell.clone(),
                    });
                }
                if v < 0.0 {
                    return Err(Error::NegativeValue {
                        machine: machine_labels[i].clone(),
                        part: part_labels[j].clone(),
                        value: v,
                    });
                }
                values.push(v);
            }
        }

        let max = values.iter().copied().fold(0.0, f64::max);
        if max > 1.0 {
            if normalize {
                for v in &mut values {
                    *v /= max;
                }
            } else {
                let pos = values.iter().position(|&v| v > 1.0).unwrap();
                return Err(Error::ValueExceedsOne {
                    machine: machine_labels[pos / parts].clone(),
                    part: part_labels[pos % parts].clone(),
                    value: values[pos],
                });
            }
        }

        let matrix = Self::new(machines, parts, values)?
            .with_labels(machine_labels, part_labels)?;
        matrix.check_coverage()?;
        Ok(matrix)
    }

    /// Errors unless every machine and every part has a nonzero entry.
    pub fn check_coverage(&self) -> Result<()> {
        for i in 0..self.machines {
            if self.row(i).iter().all(|&v| v == 0.0) {
                return Err(Error::EmptyMachine {
                    label: self.machine_labels[i].clone(),
                });
            }
        }
        for j in 0..self.parts {
            if (0..self.machines).all(|i| self.value(i, j) == 0.0) {
                return Err(Error::EmptyPart {
                    label: self.part_labels[j].clone(),
                });
            }
        }
        Ok(())
    }

    /// Writes the matrix as CSV with labels and 6-significant-digit values.
    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut file = File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let text = self.to_csv();
        file.write_all(text.as_bytes()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Renders the matrix as CSV text (header row + label column).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push(',');
        out.push_str(&self.part_labels.join(","));
        out.push('\n');
        for i in 0..self.machines {
            out.push_str(&self.machine_labels[i]);
            for j in 0..self.parts {
                out.push(',');
                out.push_str(&format_sig6(self.value(i, j)));
            }
            out.push('\n');
        }
        out
    }

    /// Row and column orders that sort machines and parts by
    /// (cell label, original index), i.e. the block-diagonal display order.
    pub fn block_permutation(
        &self,
        config: &CellConfiguration,
    ) -> Result<(Vec<usize>, Vec<usize>)> {
        config.check_dims(self.machines, self.parts)?;
        let mut rows: Vec<usize> = (0..self.machines).collect();
        rows.sort_by_key(|&i| (config.machine_cell()[i], i));
        let mut cols: Vec<usize> = (0..self.parts).collect();
        cols.sort_by_key(|&j| (config.part_cell()[j], j));
        Ok((rows, cols))
    }

    /// Reorders rows and columns so the configuration's cells form diagonal
    /// blocks. Labels follow; values are bijectively preserved.
    pub fn permute(&self, config: &CellConfiguration) -> Result<Self> {
        let (rows, cols) = self.block_permutation(config)?;
        self.reorder(&rows, &cols)
    }

    /// Reorders rows and columns by explicit index permutations.
    pub fn reorder(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if !is_permutation(rows, self.machines) || !is_permutation(cols, self.parts) {
            return Err(Error::dim(format!(
                "row/column orders must be permutations of 0..{} and 0..{}",
                self.machines, self.parts
            )));
        }
        let mut values = Vec::with_capacity(self.values.len());
        for &i in rows {
            for &j in cols {
                values.push(self.value(i, j));
            }
        }
        let machine_labels = rows.iter().map(|&i| self.machine_labels[i].clone()).collect();
        let part_labels = cols.iter().map(|&j| self.part_labels[j].clone()).collect();
        Self::new(self.machines, self.parts, values)?.with_labels(machine_labels, part_labels)
    }
}

pub(crate) fn is_permutation(order: &[usize], n: usize) -> bool {
    if order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || seen[i] {
            return false;
        }
        seen[i] = true;
    }
    true
}

/// Formats a value with 6 significant digits, trailing zeros stripped.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, Deserialize)]
struct RawCellConfiguration {
    cells: usize,
    machine_cell: Vec<usize>,
    part_cell: Vec<usize>,
}

/// Joint machine-cell and part-cell assignment with labels in `1..=cells`.
///
/// Construction validates label ranges only; a *finalized* configuration
/// additionally has at least one machine and one part in every cell
/// ([`CellConfiguration::is_fully_populated`]), which the pipeline
/// guarantees via its empty-cell repair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCellConfiguration")]
pub struct CellConfiguration {
    cells: usize,
    machine_cell: Vec<usize>,
    part_cell: Vec<usize>,
}

impl TryFrom<RawCellConfiguration> for CellConfiguration {
    type Error = Error;

    fn try_from(raw: RawCellConfiguration) -> Result<Self> {
        Self::new(raw.cells, raw.machine_cell, raw.part_cell)
    }
}

impl CellConfiguration {
    pub fn new(cells: usize, machine_cell: Vec<usize>, part_cell: Vec<usize>) -> Result<Self> {
        if cells == 0 {
            return Err(Error::param("cells", "cell count must be positive"));
        }
        if machine_cell.is_empty() || part_cell.is_empty() {
            return Err(Error::dim(
                "machine_cell and part_cell must be non-empty".to_string(),
            ));
        }
        for (what, labels) in [("machine", &machine_cell), ("part", &part_cell)] {
            if let Some(&bad) = labels.iter().find(|&&l| l == 0 || l > cells) {
                return Err(Error::param(
                    "cell label",
                    format!("{what} cell label {bad} outside 1..={cells}"),
                ));
            }
        }
        Ok(Self {
            cells,
            machine_cell,
            part_cell,
        })
    }

    /// All machines and parts in cell 1 — the identity configuration.
    pub fn single_cell(machines: usize, parts: usize) -> Result<Self> {
        Self::new(1, vec![1; machines], vec![1; parts])
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// 1-based cell label per machine index.
    pub fn machine_cell(&self) -> &[usize] {
        &self.machine_cell
    }

    /// 1-based cell label per part index.
    pub fn part_cell(&self) -> &[usize] {
        &self.part_cell
    }

    pub fn machines_in(&self, cell: usize) -> Vec<usize> {
        (0..self.machine_cell.len())
            .filter(|&i| self.machine_cell[i] == cell)
            .collect()
    }

    pub fn parts_in(&self, cell: usize) -> Vec<usize> {
        (0..self.part_cell.len())
            .filter(|&j| self.part_cell[j] == cell)
            .collect()
    }

    /// True when every cell has at least one machine and one part.
    pub fn is_fully_populated(&self) -> bool {
        (1..=self.cells).all(|c| {
            self.machine_cell.contains(&c) && self.part_cell.contains(&c)
        })
    }

    pub fn check_dims(&self, machines: usize, parts: usize) -> Result<()> {
        if self.machine_cell.len() != machines || self.part_cell.len() != parts {
            return Err(Error::dim(format!(
                "configuration covers {} machines and {} parts, matrix is {machines}x{parts}",
                self.machine_cell.len(),
                self.part_cell.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_numeric_csv() {
        let m = WorkloadMatrix::parse_csv("0.5,0\n0,0.9\n", false).unwrap();
        assert_eq!(m.machine_count(), 2);
        assert_eq!(m.part_count(), 2);
        assert_eq!(m.values(), &[0.5, 0.0, 0.0, 0.9]);
        assert_eq!(m.machine_labels(), &["m1", "m2"]);
        assert_eq!(m.part_labels(), &["p1", "p2"]);
    }

    #[test]
    fn parses_labeled_csv() {
        let m = WorkloadMatrix::parse_csv(",a,b\nrow1,0.5,0\nrow2,0,0.9\n", false).unwrap();
        assert_eq!(m.machine_labels(), &["row1", "row2"]);
        assert_eq!(m.part_labels(), &["a", "b"]);
        assert_eq!(m.value(1, 1), 0.9);
    }

    #[test]
    fn rejects_value_above_one_without_normalize() {
        let err = WorkloadMatrix::parse_csv("0.5,2.0\n0.1,0.9\n", false).unwrap_err();
        assert!(err.to_string().contains("exceeds 1"), "{err}");
    }

    #[test]
    fn normalize_divides_by_global_max() {
        let m = WorkloadMatrix::parse_csv("1.0,2.0\n0.5,4.0\n", true).unwrap();
        assert_eq!(m.values(), &[0.25, 0.5, 0.125, 1.0]);
    }

    #[test]
    fn normalize_leaves_unit_range_untouched() {
        let m = WorkloadMatrix::parse_csv("0.5,0.25\n0.25,1.0\n", true).unwrap();
        assert_eq!(m.values(), &[0.5, 0.25, 0.25, 1.0]);
    }

    #[test]
    fn rejects_ragged_rows() {
        let err = WorkloadMatrix::parse_csv("0.5,0.2\n0.1\n", false).unwrap_err();
        assert!(matches!(err, Error::RaggedRow { row: 2, .. }), "{err}");
    }

    #[test]
    fn rejects_non_numeric_payload() {
        let err = WorkloadMatrix::parse_csv("0.5,0.2\n0.1,oops\n", false).unwrap_err();
        assert!(matches!(err, Error::NonNumeric { row: 2, col: 2, .. }), "{err}");
    }

    #[test]
    fn reports_empty_row_and_column() {
        let err = WorkloadMatrix::parse_csv("0.5,0.2\n0,0\n", false).unwrap_err();
        assert!(matches!(err, Error::EmptyMachine { ref label } if label == "m2"), "{err}");
        let err = WorkloadMatrix::parse_csv("0.5,0\n0.2,0\n", false).unwrap_err();
        assert!(matches!(err, Error::EmptyPart { ref label } if label == "p2"), "{err}");
    }

    #[test]
    fn rejects_negative_values() {
        let err = WorkloadMatrix::parse_csv("0.5,-0.1\n0.2,0.3\n", false).unwrap_err();
        assert!(matches!(err, Error::NegativeValue { .. }), "{err}");
    }

    #[test]
    fn csv_round_trip_preserves_values_and_labels() {
        let m = WorkloadMatrix::parse_csv(",x,y\nfoo,0.123456789,0\nbar,0.5,0.9\n", false).unwrap();
        let back = WorkloadMatrix::parse_csv(&m.to_csv(), false).unwrap();
        assert_eq!(back.machine_labels(), m.machine_labels());
        assert_eq!(back.part_labels(), m.part_labels());
        for (a, b) in back.values().iter().zip(m.values()) {
            assert!((a - b).abs() <= 5e-7 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(0.0), "0");
        assert_eq!(format_sig6(0.53), "0.53");
        assert_eq!(format_sig6(0.123456789), "0.123457");
        assert_eq!(format_sig6(1.0), "1");
        assert_eq!(format_sig6(0.000123456789), "0.000123457");
    }

    #[test]
    fn permute_identity_is_identity() {
        let m = WorkloadMatrix::parse_csv("0.5,0.2\n0.1,0.9\n", false).unwrap();
        let config = CellConfiguration::single_cell(2, 2).unwrap();
        assert_eq!(m.permute(&config).unwrap(), m);
    }

    #[test]
    fn permute_swaps_blocks() {
        let m = WorkloadMatrix::new(2, 2, vec![0.5, 0.0, 0.0, 0.9]).unwrap();
        let config = CellConfiguration::new(2, vec![2, 1], vec![2, 1]).unwrap();
        let p = m.permute(&config).unwrap();
        assert_eq!(p.values(), &[0.9, 0.0, 0.0, 0.5]);
        assert_eq!(p.machine_labels(), &["m2", "m1"]);
        assert_eq!(p.part_labels(), &["p2", "p1"]);
        let mut orig: Vec<u64> = m.values().iter().map(|v| v.to_bits()).collect();
        let mut perm: Vec<u64> = p.values().iter().map(|v| v.to_bits()).collect();
        orig.sort_unstable();
        perm.sort_unstable();
        assert_eq!(orig, perm);
    }

    #[test]
    fn permute_rejects_dimension_mismatch() {
        let m = WorkloadMatrix::new(2, 2, vec![0.5, 0.0, 0.0, 0.9]).unwrap();
        let config = CellConfiguration::new(1, vec![1, 1, 1], vec![1, 1]).unwrap();
        assert!(m.permute(&config).is_err());
    }

    #[test]
    fn cell_configuration_validates_labels() {
        assert!(CellConfiguration::new(2, vec![1, 3], vec![1, 2]).is_err());
        assert!(CellConfiguration::new(0, vec![], vec![]).is_err());
        let c = CellConfiguration::new(2, vec![1, 2], vec![1, 1]).unwrap();
        assert!(!c.is_fully_populated());
        let c = CellConfiguration::new(2, vec![1, 2], vec![2, 1]).unwrap();
        assert!(c.is_fully_populated());
    }

    #[test]
    fn cell_configuration_json_shape() {
        let c = CellConfiguration::new(2, vec![1, 2], vec![2, 1]).unwrap();
        let json = serde_json::to_value(&c).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"cells": 2, "machine_cell": [1, 2], "part_cell": [2, 1]})
        );
        let back: CellConfiguration = serde_json::from_value(json).unwrap();
        assert_eq!(back, c);
        let bad = serde_json::json!({"cells": 1, "machine_cell": [1, 2], "part_cell": [2, 1]});
        assert!(serde_json::from_value::<CellConfiguration>(bad).is_err());
    }
}
