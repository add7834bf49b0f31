//! Bundled dataset-4 fixture and the benchmark dataset registry.
//!
//! Only dataset 4 (Seifoddini & Wolfe 1986, 8x12, workload form) ships as
//! a matrix; it is the one whose workload values are published in full.
//! The remaining registry entries document sizes and sources so
//! user-supplied CSVs can be checked against the expected shapes.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::matrix::WorkloadMatrix;

/// The bundled 8x12 workload matrix, CSV form.
pub const DATASET4_CSV: &str = include_str!("../fixtures/dataset4.csv");

const DATASET4_REFERENCES_JSON: &str = include_str!("../fixtures/dataset4_references.json");

/// Mean-grouping tolerance used when matching a reference MGE: the
/// published values carry two decimals in percent, i.e. +/-0.05pp.
pub const MGE_MATCH_TOLERANCE: f64 = 0.0005;

/// Parses the bundled dataset-4 matrix.
pub fn dataset4() -> WorkloadMatrix {
    WorkloadMatrix::parse_csv(DATASET4_CSV, false).expect("bundled dataset4 fixture is valid")
}

/// A published reference solution: the block-diagonal display orders and
/// the reported EE/MGE for one cell count.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    /// Reference figure id (5, 6, 7 for the 2-, 3-, 4-cell solutions).
    pub figure: u8,
    pub cells: usize,
    /// Displayed machine order, 0-based indices into the matrix.
    pub row_order: Vec<usize>,
    /// Displayed part order, 0-based indices into the matrix.
    pub col_order: Vec<usize>,
    pub target_ee: usize,
    pub target_mge: f64,
}

#[derive(Deserialize)]
struct RawReferences {
    solutions: Vec<RawSolution>,
}

#[derive(Deserialize)]
struct RawSolution {
    figure: u8,
    cells: usize,
    row_order: Vec<usize>,
    col_order: Vec<usize>,
    target_ee: usize,
    target_mge: f64,
}

/// The bundled reference solutions for dataset 4.
pub fn dataset4_references() -> Vec<ReferenceSolution> {
    let raw: RawReferences =
        serde_json::from_str(DATASET4_REFERENCES_JSON).expect("bundled references are valid JSON");
    raw.solutions
        .into_iter()
        .map(|s| ReferenceSolution {
            figure: s.figure,
            cells: s.cells,
            row_order: s.row_order.iter().map(|&i| i - 1).collect(),
            col_order: s.col_order.iter().map(|&j| j - 1).collect(),
            target_ee: s.target_ee,
            target_mge: s.target_mge,
        })
        .collect()
}

/// Looks up one reference solution by its figure id.
pub fn dataset4_reference(figure: u8) -> Result<ReferenceSolution> {
    dataset4_references()
        .into_iter()
        .find(|r| r.figure == figure)
        .ok_or_else(|| Error::param("figure", format!("no bundled reference figure {figure}")))
}

/// One entry of the benchmark dataset registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetInfo {
    pub id: u8,
    pub source: &'static str,
    pub machines: usize,
    pub parts: usize,
    /// Whether the workload matrix ships with this crate.
    pub bundled: bool,
}

/// Benchmark problems from the cell-formation literature, by size.
/// Matrices other than dataset 4 must be supplied as CSV by the user.
pub const DATASET_REGISTRY: [DatasetInfo; 10] = [
    DatasetInfo { id: 1, source: "King and Nakornchai (1982)", machines: 5, parts: 7, bundled: false },
    DatasetInfo { id: 2, source: "Seifoddini (1989)", machines: 5, parts: 18, bundled: false },
    DatasetInfo { id: 3, source: "Kusiak (1987)", machines: 7, parts: 11, bundled: false },
    DatasetInfo { id: 4, source: "Seifoddini and Wolfe (1986)", machines: 8, parts: 12, bundled: true },
    DatasetInfo { id: 5, source: "Chandrasekharan and Rajagopalan (1986)", machines: 8, parts: 20, bundled: false },
    DatasetInfo { id: 6, source: "Mosier and Taube (1985)", machines: 10, parts: 10, bundled: false },
    DatasetInfo { id: 7, source: "Askin and Subramanian (1987)", machines: 14, parts: 23, bundled: false },
    DatasetInfo { id: 8, source: "Srinivasan et al. (1990)", machines: 16, parts: 30, bundled: false },
    DatasetInfo { id: 9, source: "Chandrasekharan and Rajagopalan (1989)", machines: 24, parts: 40, bundled: false },
    DatasetInfo { id: 10, source: "Stanfel (1985)", machines: 30, parts: 50, bundled: false },
];
