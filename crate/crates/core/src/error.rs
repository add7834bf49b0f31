//! Error type shared by the whole crate.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("CSV error at row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error("ragged CSV: row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("non-numeric value {value:?} at row {row}, column {col}")]
    NonNumeric {
        row: usize,
        col: usize,
        value: String,
    },

    #[error("matrix has no data rows or columns")]
    EmptyMatrix,

    #[error("negative value {value} at machine {machine}, part {part}")]
    NegativeValue {
        machine: String,
        part: String,
        value: f64,
    },

    #[error("value {value} at machine {machine}, part {part} exceeds 1; pass --normalize to rescale")]
    ValueExceedsOne {
        machine: String,
        part: String,
        value: f64,
    },

    #[error("machine {label} has no nonzero operation time")]
    EmptyMachine { label: String },

    #[error("part {label} has no nonzero operation time")]
    EmptyPart { label: String },

    #[error("dimension mismatch: {message}")]
    DimensionMismatch { message: String },

    #[error("invalid parameter {name}: {message}")]
    InvalidParam { name: &'static str, message: String },

    #[error("category capacity {capacity} exhausted; part {part} left unassigned")]
    CapacityExhausted { capacity: usize, part: String },

    #[error("k = {k} exceeds {what} ({limit})")]
    KTooLarge {
        k: usize,
        what: &'static str,
        limit: usize,
    },

    #[error("cell {cell} is empty (no machines or no parts)")]
    EmptyCell { cell: usize },

    #[error("matrix has zero total workload")]
    ZeroWorkload,

    #[error(
        "no contiguous block cut matches EE={target_ee} and MGE={target_mge:.4}\u{b1}{tolerance:.4}; nearest: {nearest}"
    )]
    NoMatchingCut {
        target_ee: usize,
        target_mge: f64,
        tolerance: f64,
        nearest: String,
    },

    #[error("{count} distinct block cuts match EE={target_ee}, MGE={target_mge:.4}\u{b1}{tolerance:.4}; targets are under-determined")]
    AmbiguousCut {
        count: usize,
        target_ee: usize,
        target_mge: f64,
        tolerance: f64,
    },
}

impl Error {
    pub(crate) fn dim(message: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            message: message.into(),
        }
    }

    pub(crate) fn param(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            message: message.into(),
        }
    }
}
