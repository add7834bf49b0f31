//! Fuzzy ART network clustering complement-coded part vectors into families.
//!
//! Each part's machine-time column is complement coded to a vector of
//! dimension `2 * machines` with fixed city-block norm `machines`. Committed
//! categories hold weight vectors; presenting an input ranks categories by
//! the choice function, resonates with the first whose match passes the
//! vigilance threshold, and otherwise commits a new category. Training
//! repeats epochs over all parts until the network reaches equilibrium.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::WorkloadMatrix;
use crate::pipeline::PartFamilies;

/// Weight-change tolerance for the equilibrium stop. Exact float equality
/// would be fragile across platforms; label stability is required as well.
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-12;

/// Network parameters: vigilance rho, choice parameter alpha, learning
/// rate beta, and the category/epoch budgets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzyArtParams {
    /// Similarity threshold in [0, 1]; higher means finer clusters.
    pub vigilance: f64,
    /// Small positive constant in the choice function denominator.
    pub choice: f64,
    /// Learning rate in (0, 1]; 1.0 is fast learning.
    pub learning_rate: f64,
    pub max_categories: usize,
    pub max_epochs: usize,
}

impl Default for FuzzyArtParams {
    fn default() -> Self {
        Self {
            vigilance: 0.75,
            choice: 1e-6,
            learning_rate: 1.0,
            max_categories: 100,
            max_epochs: 200,
        }
    }
}

impl FuzzyArtParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.vigilance) || !self.vigilance.is_finite() {
            return Err(Error::param(
                "vigilance",
                format!("vigilance out of range [0, 1] (got {})", self.vigilance),
            ));
        }
        if !(self.choice > 0.0) || !self.choice.is_finite() {
            return Err(Error::param(
                "choice",
                format!("choice parameter must be positive (got {})", self.choice),
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::param(
                "learning_rate",
                format!("learning rate out of range (0, 1] (got {})", self.learning_rate),
            ));
        }
        if self.max_categories == 0 {
            return Err(Error::param("max_categories", "must be at least 1"));
        }
        if self.max_epochs == 0 {
            return Err(Error::param("max_epochs", "must be at least 1"));
        }
        Ok(())
    }
}

/// A complement-coded input vector: entries interleaved as
/// `(x_1, 1-x_1, x_2, 1-x_2, ...)`, so the city-block norm is exactly the
/// machine count regardless of the column values.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedVector {
    entries: Vec<f64>,
}

impl CodedVector {
    /// Codes one part column. Every value must lie in [0, 1].
    pub fn from_column(column: &[f64]) -> Result<Self> {
        let mut entries = Vec::with_capacity(column.len() * 2);
        for &v in column {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::param(
                    "column",
                    format!("value {v} outside [0, 1] cannot be complement coded"),
                ));
            }
            entries.push(v);
            entries.push(1.0 - v);
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn dimension(&self) -> usize {
        self.entries.len()
    }

    pub fn machine_count(&self) -> usize {
        self.entries.len() / 2
    }

    /// City-block norm; equals `machine_count` by construction.
    pub fn norm(&self) -> f64 {
        self.entries.iter().sum()
    }
}

/// Complement codes every part column of the matrix.
pub fn complement_code(matrix: &WorkloadMatrix) -> Result<Vec<CodedVector>> {
    (0..matrix.part_count())
        .map(|j| CodedVector::from_column(&matrix.column(j)))
        .collect()
}

fn check_dims(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::dim(format!(
            "vector lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

fn fuzzy_and_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.min(*y)).sum()
}

/// Choice function `T = |I ^ w| / (alpha + |w|)` with `^` the
/// component-wise minimum and `|.|` the city-block norm.
pub fn choice(input: &[f64], weight: &[f64], alpha: f64) -> Result<f64> {
    check_dims(input, weight)?;
    if !(alpha > 0.0) {
        return Err(Error::param("choice", "alpha must be positive"));
    }
    Ok(fuzzy_and_norm(input, weight) / (alpha + weight.iter().sum::<f64>()))
}

/// Resonance quantity `|I ^ w| / |I|`, compared against the vigilance.
pub fn match_degree(input: &[f64], weight: &[f64]) -> Result<f64> {
    check_dims(input, weight)?;
    let norm: f64 = input.iter().sum();
    if norm <= 0.0 {
        return Err(Error::param("input", "input norm must be positive"));
    }
    Ok(fuzzy_and_norm(input, weight) / norm)
}

/// Learning law `w_new = beta * (I ^ w) + (1 - beta) * w`; with beta = 1
/// this is exactly the fuzzy AND. Weights are component-wise
/// non-increasing; the final clamp keeps that exact under rounding
/// (the blend can otherwise creep up by one ulp when beta < 1).
pub fn learn(weight: &[f64], input: &[f64], beta: f64) -> Result<Vec<f64>> {
    check_dims(input, weight)?;
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::param("learning_rate", "beta out of range (0, 1]"));
    }
    Ok(weight
        .iter()
        .zip(input)
        .map(|(w, x)| (beta * w.min(*x) + (1.0 - beta) * w).min(*w))
        .collect())
}

/// The category network: committed weight vectors plus parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzyArtNetwork {
    params: FuzzyArtParams,
    dimension: usize,
    weights: Vec<Vec<f64>>,
}

impl FuzzyArtNetwork {
    pub fn new(params: FuzzyArtParams, machine_count: usize) -> Result<Self> {
        params.validate()?;
        if machine_count == 0 {
            return Err(Error::param("machine_count", "must be at least 1"));
        }
        Ok(Self {
            params,
            dimension: 2 * machine_count,
            weights: Vec::new(),
        })
    }

    pub fn params(&self) -> &FuzzyArtParams {
        &self.params
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn category_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    /// Committed categories ranked by descending choice value, ties broken
    /// by lowest category index.
    fn ranked(&self, entries: &[f64]) -> Vec<usize> {
        let ts: Vec<f64> = self
            .weights
            .iter()
            .map(|w| {
                fuzzy_and_norm(entries, w) / (self.params.choice + w.iter().sum::<f64>())
            })
            .collect();
        let mut order: Vec<usize> = (0..self.weights.len()).collect();
        order.sort_by(|&a, &b| ts[b].partial_cmp(&ts[a]).unwrap().then(a.cmp(&b)));
        order
    }

    /// Presents one coded input. Visits categories in rank order and
    /// resonates with the first whose match reaches the vigilance, applying
    /// the learning law when `learn_enabled`. With no resonance, commits a
    /// new category (learning law against all-ones weights) while capacity
    /// remains, else returns `None`.
    pub fn present(&mut self, input: &CodedVector, learn_enabled: bool) -> Result<Option<usize>> {
        if input.dimension() != self.dimension {
            return Err(Error::dim(format!(
                "coded input dimension {} does not match network dimension {}",
                input.dimension(),
                self.dimension
            )));
        }
        let entries = input.entries();
        let norm = input.norm();
        for j in self.ranked(entries) {
            if fuzzy_and_norm(entries, &self.weights[j]) / norm >= self.params.vigilance {
                if learn_enabled {
                    self.weights[j] = learn(&self.weights[j], entries, self.params.learning_rate)?;
                }
                return Ok(Some(j));
            }
        }
        if self.weights.len() < self.params.max_categories {
            let ones = vec![1.0; self.dimension];
            self.weights
                .push(learn(&ones, entries, self.params.learning_rate)?);
            Ok(Some(self.weights.len() - 1))
        } else {
            Ok(None)
        }
    }

    /// Read-only classification: the resonating category if any, without
    /// learning or committing. Safe to call concurrently on a shared
    /// trained network.
    pub fn classify(&self, input: &CodedVector) -> Result<Option<usize>> {
        if input.dimension() != self.dimension {
            return Err(Error::dim(format!(
                "coded input dimension {} does not match network dimension {}",
                input.dimension(),
                self.dimension
            )));
        }
        let entries = input.entries();
        let norm = input.norm();
        for j in self.ranked(entries) {
            if fuzzy_and_norm(entries, &self.weights[j]) / norm >= self.params.vigilance {
                return Ok(Some(j));
            }
        }
        Ok(None)
    }
}

/// Result of training: the settled network, the part families from the
/// final classification pass, and the number of epochs run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub network: FuzzyArtNetwork,
    pub families: PartFamilies,
    pub epochs: usize,
}

/// Trains the network on all part columns in fixed column order.
///
/// Epochs repeat until either one full epoch changes no weight component
/// by more than [`EQUILIBRIUM_TOLERANCE`] and no part changes category, or
/// `max_epochs` is reached. A final non-learning pass then yields the part
/// families, with labels compacted to `1..=F` in first-appearance order.
/// A part rejected in the final pass (capacity exhausted) is an error.
pub fn train(matrix: &WorkloadMatrix, params: &FuzzyArtParams) -> Result<TrainOutcome> {
    params.validate()?;
    let coded = complement_code(matrix)?;
    let mut network = FuzzyArtNetwork::new(params.clone(), matrix.machine_count())?;
    let mut labels: Vec<Option<usize>> = vec![None; coded.len()];
    let mut epochs = 0;
    for _ in 0..params.max_epochs {
        epochs += 1;
        let before = network.weights.clone();
        let previous = labels.clone();
        for (j, input) in coded.iter().enumerate() {
            labels[j] = network.present(input, true)?;
        }
        let settled = before.len() == network.weights.len()
            && before.iter().zip(&network.weights).all(|(a, b)| {
                a.iter().zip(b).all(|(x, y)| (x - y).abs() <= EQUILIBRIUM_TOLERANCE)
            })
            && previous == labels;
        if settled {
            break;
        }
    }
    let mut raw = Vec::with_capacity(coded.len());
    for (j, input) in coded.iter().enumerate() {
        match network.present(input, false)? {
            Some(category) => raw.push(category),
            None => {
                return Err(Error::CapacityExhausted {
                    capacity: params.max_categories,
                    part: matrix.part_labels()[j].clone(),
                })
            }
        }
    }
    let families = PartFamilies::from_raw_labels(&raw);
    Ok(TrainOutcome {
        network,
        families,
        epochs,
    })
}
