//! Serializable run report: inputs, parameters, assignments, and metrics.
//!
//! Everything except `duration_ms` is deterministic for identical
//! invocations, so reports can be diffed after stripping that one field.

use std::path::Path;

use cellform::{
    BaselineOutcome, CellConfiguration, GroupingMetrics, HybridOutcome, KMeansParams,
    MachineGroups, PartFamilies, WorkloadMatrix,
};
use serde::Serialize;

#[derive(Serialize)]
pub struct InputInfo {
    pub path: String,
    pub machines: usize,
    pub parts: usize,
}

#[derive(Serialize)]
pub struct ParamsEcho {
    pub vigilance: f64,
    pub alpha: f64,
    pub beta: f64,
    pub max_epochs: usize,
    pub max_categories: usize,
    pub k: usize,
    pub kmeans_learning_rate: f64,
    pub kmeans_convergence_tol: f64,
    pub kmeans_max_passes: usize,
    pub normalize: bool,
}

#[derive(Serialize)]
pub struct KMeansInfo {
    pub seeds: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    pub passes: usize,
    pub effective_k: usize,
    pub k_reduced: bool,
}

#[derive(Serialize)]
pub struct BaselineReport {
    pub machine_groups: MachineGroups,
    pub configuration: CellConfiguration,
    pub metrics: GroupingMetrics,
    pub kmeans: KMeansInfo,
}

#[derive(Serialize)]
pub struct RunReport {
    pub input: InputInfo,
    pub params: ParamsEcho,
    pub part_families: PartFamilies,
    pub machine_groups: MachineGroups,
    pub configuration: CellConfiguration,
    pub metrics: GroupingMetrics,
    pub art_epochs: usize,
    pub kmeans: KMeansInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline: Option<BaselineReport>,
    pub duration_ms: f64,
}

impl RunReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        input_path: &Path,
        matrix: &WorkloadMatrix,
        outcome: &HybridOutcome,
        metrics: GroupingMetrics,
        km_params: &KMeansParams,
        normalize: bool,
        baseline: Option<(&BaselineOutcome, GroupingMetrics)>,
        duration_ms: f64,
    ) -> Self {
        let art = outcome.network.params();
        Self {
            input: InputInfo {
                path: input_path.display().to_string(),
                machines: matrix.machine_count(),
                parts: matrix.part_count(),
            },
            params: ParamsEcho {
                vigilance: art.vigilance,
                alpha: art.choice,
                beta: art.learning_rate,
                max_epochs: art.max_epochs,
                max_categories: art.max_categories,
                k: km_params.k,
                kmeans_learning_rate: km_params.learning_rate,
                kmeans_convergence_tol: km_params.convergence_tol,
                kmeans_max_passes: km_params.max_passes,
                normalize,
            },
            part_families: outcome.families.clone(),
            machine_groups: outcome.groups.clone(),
            configuration: outcome.config.clone(),
            metrics,
            art_epochs: outcome.art_epochs,
            kmeans: KMeansInfo {
                seeds: outcome.kmeans.seeds.seeds().to_vec(),
                assignments: outcome.kmeans.labels.clone(),
                passes: outcome.kmeans.passes,
                effective_k: outcome.kmeans.effective_k,
                k_reduced: outcome.kmeans.k_reduced,
            },
            baseline: baseline.map(|(b, m)| BaselineReport {
                machine_groups: b.groups.clone(),
                configuration: b.config.clone(),
                metrics: m,
                kmeans: KMeansInfo {
                    seeds: b.kmeans.seeds.seeds().to_vec(),
                    assignments: b.kmeans.labels.clone(),
                    passes: b.kmeans.passes,
                    effective_k: b.kmeans.effective_k,
                    k_reduced: b.kmeans.k_reduced,
                },
            }),
            duration_ms,
        }
    }
}

/// Network diagnostic dump: parameters, category weights, family labels.
#[derive(Serialize)]
pub struct NetworkDump<'a> {
    pub params: &'a cellform::FuzzyArtParams,
    pub weights: &'a [Vec<f64>],
    pub part_families: &'a PartFamilies,
}

pub fn percent(fraction: f64) -> String {
    format!("{:.2}%", fraction * 100.0)
}
