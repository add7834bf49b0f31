//! The hybrid cell-formation pipeline: fuzzy ART part families, k-means
//! machine groups over per-family workload features, and the join of the
//! two into a cell configuration. Also hosts the plain k-means baseline
//! and the cell-count sweep.
//!
//! The k-means feature space is the per-family workload sum: feature `f`
//! of machine `i` is the total time machine `i` spends on parts of family
//! `f`. Each family is then attached to the machine group with which it
//! shares the most processing time; a machine group that receives no
//! family is merged into the attached group with the nearest seed, so a
//! finalized configuration never has an empty cell.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fuzzy_art::{self, FuzzyArtNetwork, FuzzyArtParams};
use crate::kmeans::{self, KMeansFit, KMeansParams};
use crate::matrix::{CellConfiguration, WorkloadMatrix};
use crate::metrics::{self, GroupingMetrics};

/// Assignment of parts to families, labels contiguous in `1..=count`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartFamilies {
    count: usize,
    assignment: Vec<usize>,
}

impl PartFamilies {
    pub fn new(count: usize, assignment: Vec<usize>) -> Result<Self> {
        validate_labels("family", count, &assignment)?;
        Ok(Self { count, assignment })
    }

    /// Compacts arbitrary labels to `1..=F` in first-appearance order.
    pub fn from_raw_labels(raw: &[usize]) -> Self {
        let (count, assignment) = compact_first_appearance(raw);
        Self { count, assignment }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// 1-based family label per part index.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn family_of(&self, part: usize) -> usize {
        self.assignment[part]
    }

    pub fn members(&self, family: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&j| self.assignment[j] == family)
            .collect()
    }

    pub fn part_count(&self) -> usize {
        self.assignment.len()
    }
}

/// Assignment of machines to groups, labels contiguous in `1..=count`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MachineGroups {
    count: usize,
    assignment: Vec<usize>,
}

impl MachineGroups {
    pub fn new(count: usize, assignment: Vec<usize>) -> Result<Self> {
        validate_labels("group", count, &assignment)?;
        Ok(Self { count, assignment })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// 1-based group label per machine index.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn group_of(&self, machine: usize) -> usize {
        self.assignment[machine]
    }

    pub fn members(&self, group: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == group)
            .collect()
    }
}

fn validate_labels(what: &'static str, count: usize, assignment: &[usize]) -> Result<()> {
    if count == 0 || assignment.is_empty() {
        return Err(Error::param("assignment", format!("{what} assignment is empty")));
    }
    for c in 1..=count {
        if !assignment.contains(&c) {
            return Err(Error::param(
                "assignment",
                format!("{what} {c} has no members"),
            ));
        }
    }
    if let Some(&bad) = assignment.iter().find(|&&l| l == 0 || l > count) {
        return Err(Error::param(
            "assignment",
            format!("{what} label {bad} outside 1..={count}"),
        ));
    }
    Ok(())
}

fn compact_first_appearance(raw: &[usize]) -> (usize, Vec<usize>) {
    let mut seen: Vec<usize> = Vec::new();
    let assignment = raw
        .iter()
        .map(|&r| match seen.iter().position(|&s| s == r) {
            Some(pos) => pos + 1,
            None => {
                seen.push(r);
                seen.len()
            }
        })
        .collect();
    (seen.len(), assignment)
}

/// Per-machine feature vectors for machine grouping: feature `f` of
/// machine `i` is the total processing time of machine `i` over the parts
/// of family `f`. The result is linear in the matrix values.
pub fn machine_features(
    matrix: &WorkloadMatrix,
    families: &PartFamilies,
) -> Result<Vec<Vec<f64>>> {
    if families.part_count() != matrix.part_count() {
        return Err(Error::dim(format!(
            "families cover {} parts, matrix has {}",
            families.part_count(),
            matrix.part_count()
        )));
    }
    let f_count = families.count();
    let mut features = vec![vec![0.0; f_count]; matrix.machine_count()];
    for j in 0..matrix.part_count() {
        let f = families.family_of(j) - 1;
        for (i, row) in features.iter_mut().enumerate() {
            row[f] += matrix.value(i, j);
        }
    }
    Ok(features)
}

/// Everything produced by one hybrid run.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridOutcome {
    pub config: CellConfiguration,
    pub families: PartFamilies,
    pub groups: MachineGroups,
    pub network: FuzzyArtNetwork,
    pub kmeans: KMeansFit,
    pub art_epochs: usize,
}

/// Runs the full hybrid: fuzzy ART part families, k-means machine groups
/// over the family features, then the family-to-group join.
pub fn run_hybrid(
    matrix: &WorkloadMatrix,
    art_params: &FuzzyArtParams,
    km_params: &KMeansParams,
) -> Result<HybridOutcome> {
    if km_params.k > matrix.machine_count() {
        return Err(Error::KTooLarge {
            k: km_params.k,
            what: "machine count",
            limit: matrix.machine_count(),
        });
    }
    let trained = fuzzy_art::train(matrix, art_params)?;
    let formed = form_cells(matrix, &trained.families, km_params)?;
    Ok(HybridOutcome {
        config: formed.config,
        families: trained.families,
        groups: formed.groups,
        network: trained.network,
        kmeans: formed.fit,
        art_epochs: trained.epochs,
    })
}

pub(crate) struct FormedCells {
    pub config: CellConfiguration,
    pub groups: MachineGroups,
    pub fit: KMeansFit,
}

/// Machine grouping + family attachment for a fixed set of families.
pub(crate) fn form_cells(
    matrix: &WorkloadMatrix,
    families: &PartFamilies,
    km_params: &KMeansParams,
) -> Result<FormedCells> {
    let features = machine_features(matrix, families)?;
    let fit = kmeans::fit(&features, km_params)?;
    let k = fit.effective_k;

    // group labels compacted over non-empty clusters, ascending seed index
    let populated: Vec<usize> = (0..k).filter(|g| fit.labels.contains(g)).collect();
    let group_label = |g: usize| populated.iter().position(|&h| h == g).unwrap() + 1;
    let groups = MachineGroups::new(
        populated.len(),
        fit.labels.iter().map(|&g| group_label(g)).collect(),
    )?;

    // attach each family to the group sharing the most processing time
    let cross = |family: usize, group: usize| -> f64 {
        let mut total = 0.0;
        for j in families.members(family) {
            for i in 0..matrix.machine_count() {
                if fit.labels[i] == group {
                    total += matrix.value(i, j);
                }
            }
        }
        total
    };
    let mut attached_group = vec![0usize; families.count()];
    for f in 1..=families.count() {
        let mut best = populated[0];
        let mut best_cross = cross(f, best);
        for &g in &populated[1..] {
            let c = cross(f, g);
            if c > best_cross {
                best_cross = c;
                best = g;
            }
        }
        attached_group[f - 1] = best;
    }

    // a group with no family merges into the attached group with the
    // nearest seed; its machines follow
    let mut member_group = fit.labels.clone();
    let attached: Vec<usize> = {
        let mut v = attached_group.clone();
        v.sort_unstable();
        v.dedup();
        v
    };
    for &g in &populated {
        if !attached.contains(&g) {
            let target = attached
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    let da = seed_distance(&fit, g, a);
                    let db = seed_distance(&fit, g, b);
                    da.partial_cmp(&db).unwrap().then(a.cmp(&b))
                })
                .expect("every family is attached to some group");
            for m in member_group.iter_mut() {
                if *m == g {
                    *m = target;
                }
            }
        }
    }

    // compact cell labels over the remaining groups, ascending seed index
    let cell_of_group = |g: usize| attached.iter().position(|&h| h == g).unwrap() + 1;
    let machine_cell: Vec<usize> = member_group.iter().map(|&g| cell_of_group(g)).collect();
    let part_cell: Vec<usize> = (0..matrix.part_count())
        .map(|j| cell_of_group(attached_group[families.family_of(j) - 1]))
        .collect();
    let config = CellConfiguration::new(attached.len(), machine_cell, part_cell)?;
    debug_assert!(config.is_fully_populated());
    Ok(FormedCells { config, groups, fit })
}

fn seed_distance(fit: &KMeansFit, a: usize, b: usize) -> f64 {
    fit.seeds.seeds()[a]
        .iter()
        .zip(&fit.seeds.seeds()[b])
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

/// Outcome of the plain k-means comparator.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineOutcome {
    pub config: CellConfiguration,
    pub groups: MachineGroups,
    pub kmeans: KMeansFit,
}

/// Plain k-means baseline: clusters machines on their raw workload rows,
/// then attaches each part to the group with the most processing time for
/// it (ties to the lowest group label).
pub fn run_kmeans_baseline(
    matrix: &WorkloadMatrix,
    k: usize,
    km_params: &KMeansParams,
) -> Result<BaselineOutcome> {
    let limit = matrix.machine_count().min(matrix.part_count());
    if k > limit {
        return Err(Error::KTooLarge {
            k,
            what: "min(machine count, part count)",
            limit,
        });
    }
    let rows: Vec<Vec<f64>> = (0..matrix.machine_count())
        .map(|i| matrix.row(i).to_vec())
        .collect();
    let mut params = km_params.clone();
    params.k = k;
    let fit = kmeans::fit(&rows, &params)?;
    let ek = fit.effective_k;

    let populated: Vec<usize> = (0..ek).filter(|g| fit.labels.contains(g)).collect();
    let groups = MachineGroups::new(
        populated.len(),
        fit.labels
            .iter()
            .map(|&g| populated.iter().position(|&h| h == g).unwrap() + 1)
            .collect(),
    )?;

    let mut part_group = vec![0usize; matrix.part_count()];
    for (j, slot) in part_group.iter_mut().enumerate() {
        let mut best = populated[0];
        let mut best_time = -1.0;
        for &g in &populated {
            let time: f64 = (0..matrix.machine_count())
                .filter(|&i| fit.labels[i] == g)
                .map(|i| matrix.value(i, j))
                .sum();
            if time > best_time {
                best_time = time;
                best = g;
            }
        }
        *slot = best;
    }

    let mut member_group = fit.labels.clone();
    let attached: Vec<usize> = {
        let mut v = part_group.clone();
        v.sort_unstable();
        v.dedup();
        v
    };
    for &g in &populated {
        if !attached.contains(&g) {
            let target = attached
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    let da = seed_distance(&fit, g, a);
                    let db = seed_distance(&fit, g, b);
                    da.partial_cmp(&db).unwrap().then(a.cmp(&b))
                })
                .expect("every part is attached to some group");
            for m in member_group.iter_mut() {
                if *m == g {
                    *m = target;
                }
            }
        }
    }
    let cell_of_group = |g: usize| attached.iter().position(|&h| h == g).unwrap() + 1;
    let machine_cell: Vec<usize> = member_group.iter().map(|&g| cell_of_group(g)).collect();
    let part_cell: Vec<usize> = part_group.iter().map(|&g| cell_of_group(g)).collect();
    let config = CellConfiguration::new(attached.len(), machine_cell, part_cell)?;
    Ok(BaselineOutcome {
        config,
        groups,
        kmeans: fit,
    })
}

/// One sweep row: the configuration and metrics obtained at a given `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub ee: usize,
    pub mge: f64,
    pub voids: usize,
    pub cells: usize,
    #[serde(skip)]
    pub config: CellConfiguration,
    #[serde(skip)]
    pub metrics: GroupingMetrics,
}

/// Sweep outcome: rows sorted by `k` and the index of the optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub optimal: usize,
}

impl SweepOutcome {
    pub fn optimal_row(&self) -> &SweepRow {
        &self.rows[self.optimal]
    }
}

/// Runs the hybrid for every `k` in `k_min..=k_max`, training the fuzzy
/// ART network once (family formation does not depend on `k`). The
/// optimum is the row maximizing MGE, ties broken by fewest exceptional
/// elements, then smallest `k`.
pub fn sweep_cells(
    matrix: &WorkloadMatrix,
    k_min: usize,
    k_max: usize,
    art_params: &FuzzyArtParams,
    km_params: &KMeansParams,
) -> Result<SweepOutcome> {
    if k_min == 0 || k_min > k_max {
        return Err(Error::param(
            "k range",
            format!("need 1 <= k_min <= k_max, got {k_min}..={k_max}"),
        ));
    }
    if k_max > matrix.machine_count() {
        return Err(Error::KTooLarge {
            k: k_max,
            what: "machine count",
            limit: matrix.machine_count(),
        });
    }
    let trained = fuzzy_art::train(matrix, art_params)?;
    let mut rows = Vec::with_capacity(k_max - k_min + 1);
    for k in k_min..=k_max {
        let mut params = km_params.clone();
        params.k = k;
        let formed = form_cells(matrix, &trained.families, &params)?;
        let metrics = metrics::evaluate(matrix, &formed.config)?;
        rows.push(SweepRow {
            k,
            ee: metrics.ee,
            mge: metrics.mge,
            voids: metrics.voids_total,
            cells: formed.config.cells(),
            config: formed.config,
            metrics,
        });
    }
    let mut optimal = 0;
    for (i, row) in rows.iter().enumerate().skip(1) {
        let best = &rows[optimal];
        if row.mge > best.mge || (row.mge == best.mge && row.ee < best.ee) {
            optimal = i;
        }
    }
    Ok(SweepOutcome { rows, optimal })
}
