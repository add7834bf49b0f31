//! Grouping-quality measures over a (matrix, configuration) pair:
//! exceptional elements, voids, per-cell processing times, and the
//! modified grouping efficiency (MGE)
//!
//! ```text
//! MGE = T_pti / (T_pto + sum_k T_ptk + sum_k T_ptk * N_vk / N_ek)
//! ```
//!
//! where `T_pti`/`T_pto` are the processing times inside/outside the
//! cells, `T_ptk` the processing time of cell `k`, `N_vk` its void count
//! and `N_ek = machines_k * parts_k` its element count. The denominator is
//! computed term by term as written (note `sum_k T_ptk = T_pti`), so any
//! bookkeeping inconsistency surfaces against fixtures instead of being
//! absorbed by algebraic simplification. MGE is 1 exactly when the cells
//! are perfectly packed: no exceptional elements and no voids.

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{is_permutation, CellConfiguration, WorkloadMatrix};

/// Per-cell tallies: machine/part counts, processing time, voids, elements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellMetrics {
    pub machines: usize,
    pub parts: usize,
    pub t_ptk: f64,
    pub n_vk: usize,
    pub n_ek: usize,
}

/// Full grouping metrics for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupingMetrics {
    pub mge: f64,
    pub ee: usize,
    pub voids_total: usize,
    pub cells: Vec<CellMetrics>,
    pub t_pti: f64,
    pub t_pto: f64,
}

/// Evaluates all grouping metrics for `config` over `matrix`.
///
/// Sums iterate cells in label order and machines/parts in index order
/// within each cell, so a block permutation of the matrix together with
/// the correspondingly permuted configuration reproduces every field
/// bit for bit. Errors if any cell has no machines or no parts.
pub fn evaluate(matrix: &WorkloadMatrix, config: &CellConfiguration) -> Result<GroupingMetrics> {
    config.check_dims(matrix.machine_count(), matrix.part_count())?;
    let c = config.cells();
    let machines_by_cell: Vec<Vec<usize>> = (1..=c).map(|k| config.machines_in(k)).collect();
    let parts_by_cell: Vec<Vec<usize>> = (1..=c).map(|k| config.parts_in(k)).collect();

    let mut cells = Vec::with_capacity(c);
    for k in 0..c {
        let ms = &machines_by_cell[k];
        let ps = &parts_by_cell[k];
        if ms.is_empty() || ps.is_empty() {
            return Err(Error::EmptyCell { cell: k + 1 });
        }
        let mut t_ptk = 0.0;
        let mut n_vk = 0;
        for &i in ms {
            for &j in ps {
                let v = matrix.value(i, j);
                t_ptk += v;
                if v == 0.0 {
                    n_vk += 1;
                }
            }
        }
        cells.push(CellMetrics {
            machines: ms.len(),
            parts: ps.len(),
            t_ptk,
            n_vk,
            n_ek: ms.len() * ps.len(),
        });
    }

    let t_pti: f64 = cells.iter().map(|cm| cm.t_ptk).sum();
    let mut t_pto = 0.0;
    let mut ee = 0;
    for a in 0..c {
        for &i in &machines_by_cell[a] {
            for (b, parts) in parts_by_cell.iter().enumerate() {
                if a == b {
                    continue;
                }
                for &j in parts {
                    let v = matrix.value(i, j);
                    t_pto += v;
                    if v > 0.0 {
                        ee += 1;
                    }
                }
            }
        }
    }

    let sum_t_ptk: f64 = cells.iter().map(|cm| cm.t_ptk).sum();
    let void_term: f64 = cells
        .iter()
        .map(|cm| cm.t_ptk * cm.n_vk as f64 / cm.n_ek as f64)
        .sum();
    let denominator = t_pto + sum_t_ptk + void_term;
    if denominator == 0.0 {
        return Err(Error::ZeroWorkload);
    }
    Ok(GroupingMetrics {
        mge: t_pti / denominator,
        ee,
        voids_total: cells.iter().map(|cm| cm.n_vk).sum(),
        cells,
        t_pti,
        t_pto,
    })
}

/// One enumerated cut of the display orders into contiguous blocks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutCandidate {
    /// Cut positions into the displayed row order (block boundaries).
    pub row_cuts: Vec<usize>,
    pub col_cuts: Vec<usize>,
    pub ee: usize,
    pub mge: f64,
}

/// A configuration recovered by [`reconstruct_config`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedConfig {
    pub config: CellConfiguration,
    pub metrics: GroupingMetrics,
    pub row_cuts: Vec<usize>,
    pub col_cuts: Vec<usize>,
}

/// Builds the configuration in which displayed row block `i` and column
/// block `i` form cell `i + 1`. Orders are 0-based matrix indices in
/// display order; cuts are positions into those orders.
pub fn config_for_cuts(
    row_order: &[usize],
    col_order: &[usize],
    row_cuts: &[usize],
    col_cuts: &[usize],
) -> Result<CellConfiguration> {
    let cells = row_cuts.len() + 1;
    if col_cuts.len() + 1 != cells {
        return Err(Error::dim(
            "row and column cuts must produce the same number of blocks".to_string(),
        ));
    }
    let mut machine_cell = vec![0usize; row_order.len()];
    let mut part_cell = vec![0usize; col_order.len()];
    let fill = |order: &[usize], cuts: &[usize], out: &mut [usize]| {
        let mut bounds = vec![0];
        bounds.extend_from_slice(cuts);
        bounds.push(order.len());
        for cell in 0..cells {
            for &idx in &order[bounds[cell]..bounds[cell + 1]] {
                out[idx] = cell + 1;
            }
        }
    };
    fill(row_order, row_cuts, &mut machine_cell);
    fill(col_order, col_cuts, &mut part_cell);
    CellConfiguration::new(cells, machine_cell, part_cell)
}

/// Evaluates every way to cut the displayed row and column orders into
/// `cells` contiguous blocks (paired in display order). Candidates are
/// returned in lexicographic cut order.
pub fn enumerate_cuts(
    matrix: &WorkloadMatrix,
    row_order: &[usize],
    col_order: &[usize],
    cells: usize,
) -> Result<Vec<CutCandidate>> {
    if !is_permutation(row_order, matrix.machine_count())
        || !is_permutation(col_order, matrix.part_count())
    {
        return Err(Error::dim(format!(
            "display orders must be permutations of 0..{} and 0..{}",
            matrix.machine_count(),
            matrix.part_count()
        )));
    }
    if cells == 0 || cells > matrix.machine_count() || cells > matrix.part_count() {
        return Err(Error::param(
            "cells",
            format!("cell count {cells} is outside 1..=min(machines, parts)"),
        ));
    }
    let mut out = Vec::new();
    for row_cuts in (1..matrix.machine_count()).combinations(cells - 1) {
        for col_cuts in (1..matrix.part_count()).combinations(cells - 1) {
            let config = config_for_cuts(row_order, col_order, &row_cuts, &col_cuts)?;
            let metrics = evaluate(matrix, &config)?;
            out.push(CutCandidate {
                row_cuts: row_cuts.clone(),
                col_cuts,
                ee: metrics.ee,
                mge: metrics.mge,
            });
        }
    }
    Ok(out)
}

/// Recovers the block configuration behind a displayed (row order, column
/// order, cell count) triple by exhaustive cut enumeration: the unique cut
/// whose exceptional-element count equals `target_ee` exactly and whose
/// MGE is within `mge_tol` of `target_mge`.
///
/// Errors when no cut matches (reporting the nearest candidates) and when
/// several do (the targets under-determine the display).
pub fn reconstruct_config(
    matrix: &WorkloadMatrix,
    row_order: &[usize],
    col_order: &[usize],
    cells: usize,
    target_ee: usize,
    target_mge: f64,
    mge_tol: f64,
) -> Result<ReconstructedConfig> {
    if !(mge_tol >= 0.0) {
        return Err(Error::param("mge_tol", "tolerance must be non-negative"));
    }
    let candidates = enumerate_cuts(matrix, row_order, col_order, cells)?;
    let matches: Vec<&CutCandidate> = candidates
        .iter()
        .filter(|c| c.ee == target_ee && (c.mge - target_mge).abs() <= mge_tol)
        .collect();
    match matches.len() {
        0 => {
            let nearest = nearest_candidates(&candidates, target_ee, target_mge, 3);
            let summary = nearest
                .iter()
                .map(|c| {
                    format!(
                        "EE={} MGE={:.4} rows@{:?} cols@{:?}",
                        c.ee, c.mge, c.row_cuts, c.col_cuts
                    )
                })
                .join("; ");
            Err(Error::NoMatchingCut {
                target_ee,
                target_mge,
                tolerance: mge_tol,
                nearest: summary,
            })
        }
        1 => {
            let hit = matches[0];
            let config = config_for_cuts(row_order, col_order, &hit.row_cuts, &hit.col_cuts)?;
            let metrics = evaluate(matrix, &config)?;
            Ok(ReconstructedConfig {
                config,
                metrics,
                row_cuts: hit.row_cuts.clone(),
                col_cuts: hit.col_cuts.clone(),
            })
        }
        n => Err(Error::AmbiguousCut {
            count: n,
            target_ee,
            target_mge,
            tolerance: mge_tol,
        }),
    }
}

/// The candidates closest to the targets, by |MGE error| + |EE error|.
pub fn nearest_candidates(
    candidates: &[CutCandidate],
    target_ee: usize,
    target_mge: f64,
    take: usize,
) -> Vec<CutCandidate> {
    let score = |c: &CutCandidate| {
        (c.mge - target_mge).abs() + (c.ee as f64 - target_ee as f64).abs()
    };
    let mut sorted: Vec<&CutCandidate> = candidates.iter().collect();
    sorted.sort_by(|a, b| score(a).partial_cmp(&score(b)).unwrap());
    sorted.into_iter().take(take).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_two_block() -> (WorkloadMatrix, CellConfiguration) {
        let m = WorkloadMatrix::new(
            4,
            4,
            vec![
                0.9, 0.8, 0.0, 0.0, //
                0.7, 0.9, 0.0, 0.0, //
                0.0, 0.0, 0.6, 0.9, //
                0.0, 0.0, 0.9, 0.5,
            ],
        )
        .unwrap();
        let c = CellConfiguration::new(2, vec![1, 1, 2, 2], vec![1, 1, 2, 2]).unwrap();
        (m, c)
    }

    #[test]
    fn perfectly_packed_cells_reach_mge_one() {
        let (m, c) = dense_two_block();
        let g = evaluate(&m, &c).unwrap();
        assert_eq!(g.ee, 0);
        assert_eq!(g.voids_total, 0);
        assert!((g.mge - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_workload_outside_cells_gives_zero() {
        let m = WorkloadMatrix::new(2, 2, vec![0.0, 0.7, 0.4, 0.0]).unwrap();
        let c = CellConfiguration::new(2, vec![1, 2], vec![1, 2]).unwrap();
        let g = evaluate(&m, &c).unwrap();
        assert_eq!(g.t_pti, 0.0);
        assert_eq!(g.mge, 0.0);
        assert_eq!(g.ee, 2);
    }

    #[test]
    fn conservation_and_nonzero_split() {
        let m = WorkloadMatrix::new(
            3,
            3,
            vec![
                0.9, 0.1, 0.0, //
                0.0, 0.8, 0.1, //
                0.1, 0.0, 0.7,
            ],
        )
        .unwrap();
        let c = CellConfiguration::new(2, vec![1, 1, 2], vec![1, 1, 2]).unwrap();
        let g = evaluate(&m, &c).unwrap();
        let total = m.total();
        assert!(((g.t_pti + g.t_pto) - total).abs() <= 1e-9 * total);
        let in_cell_nonzeros: usize = g
            .cells
            .iter()
            .map(|cm| cm.n_ek - cm.n_vk)
            .sum();
        assert_eq!(g.ee + in_cell_nonzeros, m.nonzero_count());
    }

    #[test]
    fn empty_cell_is_an_error() {
        let m = WorkloadMatrix::new(2, 2, vec![0.5, 0.1, 0.1, 0.5]).unwrap();
        let c = CellConfiguration::new(2, vec![1, 2], vec![1, 1]).unwrap();
        assert!(matches!(evaluate(&m, &c), Err(Error::EmptyCell { cell: 2 })));
    }

    #[test]
    fn mge_is_one_iff_no_ee_and_no_voids() {
        let (m, c) = dense_two_block();
        let g = evaluate(&m, &c).unwrap();
        assert!(g.mge == 1.0 || g.ee > 0 || g.voids_total > 0);

        // introduce a void: zero out one in-cell entry
        let mut vals = m.values().to_vec();
        vals[1] = 0.0;
        let voided = WorkloadMatrix::new(4, 4, vals).unwrap();
        let g = evaluate(&voided, &c).unwrap();
        assert_eq!(g.voids_total, 1);
        assert!(g.mge < 1.0);
    }

    #[test]
    fn extra_voids_strictly_decrease_mge() {
        let (m, c) = dense_two_block();
        let g = evaluate(&m, &c).unwrap();
        // recompute the formula with one extra void in cell 1 and nothing
        // else changed: the denominator strictly grows
        let base_void: f64 = g
            .cells
            .iter()
            .map(|cm| cm.t_ptk * cm.n_vk as f64 / cm.n_ek as f64)
            .sum();
        let bumped: f64 = g
            .cells
            .iter()
            .enumerate()
            .map(|(i, cm)| {
                let voids = if i == 0 { cm.n_vk + 1 } else { cm.n_vk };
                cm.t_ptk * voids as f64 / cm.n_ek as f64
            })
            .sum();
        let sum_t: f64 = g.cells.iter().map(|cm| cm.t_ptk).sum();
        let before = g.t_pti / (g.t_pto + sum_t + base_void);
        let after = g.t_pti / (g.t_pto + sum_t + bumped);
        assert!(after < before);
    }

    #[test]
    fn scale_invariance() {
        let m = WorkloadMatrix::new(
            2,
            3,
            vec![0.9, 0.1, 0.0, 0.0, 0.8, 0.4],
        )
        .unwrap();
        let c = CellConfiguration::new(2, vec![1, 2], vec![1, 2, 2]).unwrap();
        let g = evaluate(&m, &c).unwrap();
        for s in [0.1, 0.5, 2.0] {
            let scaled =
                WorkloadMatrix::new(2, 3, m.values().iter().map(|v| v * s).collect()).unwrap();
            let gs = evaluate(&scaled, &c).unwrap();
            assert!((gs.mge - g.mge).abs() <= 1e-9, "s={s}");
            assert_eq!(gs.ee, g.ee);
            assert_eq!(gs.voids_total, g.voids_total);
        }
    }

    #[test]
    fn permutation_invariance_is_exact() {
        let m = WorkloadMatrix::new(
            3,
            4,
            vec![
                0.9, 0.0, 0.3, 0.0, //
                0.0, 0.8, 0.0, 0.2, //
                0.1, 0.0, 0.7, 0.5,
            ],
        )
        .unwrap();
        let c = CellConfiguration::new(2, vec![2, 1, 2], vec![2, 1, 2, 1]).unwrap();
        let g = evaluate(&m, &c).unwrap();

        let permuted = m.permute(&c).unwrap();
        let (rows, cols) = m.block_permutation(&c).unwrap();
        let machine_cell = rows.iter().map(|&i| c.machine_cell()[i]).collect();
        let part_cell = cols.iter().map(|&j| c.part_cell()[j]).collect();
        let pc = CellConfiguration::new(c.cells(), machine_cell, part_cell).unwrap();
        let gp = evaluate(&permuted, &pc).unwrap();

        assert_eq!(g.mge.to_bits(), gp.mge.to_bits());
        assert_eq!(g.t_pti.to_bits(), gp.t_pti.to_bits());
        assert_eq!(g.t_pto.to_bits(), gp.t_pto.to_bits());
        assert_eq!(g.ee, gp.ee);
        assert_eq!(g.cells, gp.cells);
    }

    #[test]
    fn reconstruction_recovers_a_known_cut() {
        let (m, c) = dense_two_block();
        let g = evaluate(&m, &c).unwrap();
        let rows = vec![0, 1, 2, 3];
        let cols = vec![0, 1, 2, 3];
        let r = reconstruct_config(&m, &rows, &cols, 2, g.ee, g.mge, 1e-9).unwrap();
        assert_eq!(r.config, c);
        assert_eq!(r.row_cuts, vec![2]);
        assert_eq!(r.col_cuts, vec![2]);
    }

    #[test]
    fn reconstruction_reports_no_match_with_nearest() {
        let (m, _) = dense_two_block();
        let rows = vec![0, 1, 2, 3];
        let cols = vec![0, 1, 2, 3];
        let err = reconstruct_config(&m, &rows, &cols, 2, 0, 0.42, 0.0005).unwrap_err();
        match err {
            Error::NoMatchingCut { ref nearest, .. } => {
                assert!(nearest.contains("EE="), "{nearest}");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn reconstruction_detects_ambiguity() {
        // three identical diagonal singletons: cutting after row/col 1 or
        // after row/col 2 yields the same metrics
        let m = WorkloadMatrix::new(
            3,
            3,
            vec![
                0.5, 0.0, 0.0, //
                0.0, 0.5, 0.0, //
                0.0, 0.0, 0.5,
            ],
        )
        .unwrap();
        let rows = vec![0, 1, 2];
        let cols = vec![0, 1, 2];
        let candidates = enumerate_cuts(&m, &rows, &cols, 2).unwrap();
        let target = candidates
            .iter()
            .find(|c| c.row_cuts == vec![1] && c.col_cuts == vec![1])
            .unwrap()
            .clone();
        let err =
            reconstruct_config(&m, &rows, &cols, 2, target.ee, target.mge, 0.0005).unwrap_err();
        assert!(matches!(err, Error::AmbiguousCut { .. }), "{err}");
    }
}
