//! Cell formation for cellular manufacturing over real-valued workload
//! matrices.
//!
//! The input is a dense machines x parts matrix of operation times. A
//! fuzzy ART network clusters the complement-coded part columns into part
//! families; an online k-means learner groups machines on their per-family
//! workload features; joining the two yields a cell configuration whose
//! quality is measured by exceptional elements, voids, and the modified
//! grouping efficiency (MGE).
//!
//! ```
//! use cellform::{fixtures, FuzzyArtParams, KMeansParams};
//!
//! let matrix = fixtures::dataset4();
//! let out = cellform::run_hybrid(&matrix, &FuzzyArtParams::default(), &KMeansParams::new(3))
//!     .unwrap();
//! let metrics = cellform::evaluate(&matrix, &out.config).unwrap();
//! assert_eq!(out.config.cells(), 3);
//! assert!(metrics.mge > 0.0 && metrics.mge <= 1.0);
//! ```
//!
//! Everything is deterministic: identical inputs produce identical
//! clusterings, byte for byte. No randomness is used anywhere.

pub mod error;
pub mod fixtures;
pub mod fuzzy_art;
pub mod kmeans;
pub mod matrix;
pub mod metrics;
pub mod pipeline;

pub use error::{Error, Result};
pub use fuzzy_art::{
    complement_code, train, CodedVector, FuzzyArtNetwork, FuzzyArtParams, TrainOutcome,
};
pub use kmeans::{KMeansFit, KMeansParams, SeedPoints};
pub use matrix::{CellConfiguration, WorkloadMatrix};
pub use metrics::{
    evaluate, reconstruct_config, CellMetrics, CutCandidate, GroupingMetrics, ReconstructedConfig,
};
pub use pipeline::{
    machine_features, run_hybrid, run_kmeans_baseline, sweep_cells, BaselineOutcome,
    HybridOutcome, MachineGroups, PartFamilies, SweepOutcome, SweepRow,
};
