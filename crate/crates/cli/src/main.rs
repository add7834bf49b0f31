//! Command-line front end: load workload matrices, run the hybrid
//! clustering or the plain k-means baseline, sweep cell counts, and verify
//! the bundled dataset-4 reference solutions.
//!
//! Exit codes: 0 success, 2 input validation, 3 algorithm failure,
//! 4 fixture verification failure.

mod render;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use cellform::{
    fixtures, metrics, pipeline, Error, FuzzyArtParams, KMeansParams, WorkloadMatrix,
};
use report::{percent, NetworkDump, RunReport};

#[derive(Parser)]
#[command(
    name = "cellform",
    version,
    about = "Cell formation for cellular manufacturing from workload matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a workload matrix into cells (fuzzy ART + k-means)
    Cluster(ClusterArgs),
    /// Run the clustering for a range of cell counts and flag the optimum
    Sweep(SweepArgs),
    /// Check the bundled dataset-4 fixture against its reference solutions
    VerifyFixture(VerifyFixtureArgs),
}

#[derive(clap::Args)]
struct ArtFlags {
    /// Fuzzy ART vigilance (similarity threshold in [0, 1])
    #[arg(long, default_value_t = 0.75)]
    vigilance: f64,
    /// Fuzzy ART choice parameter
    #[arg(long, default_value_t = 1e-6)]
    alpha: f64,
    /// Fuzzy ART learning rate in (0, 1]
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Fuzzy ART epoch budget
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    /// k-means learning rate in (0, 1)
    #[arg(long = "learning-rate", default_value_t = 0.1)]
    learning_rate: f64,
    /// Divide by the max value when the input exceeds 1
    #[arg(long)]
    normalize: bool,
}

impl ArtFlags {
    fn art_params(&self) -> FuzzyArtParams {
        FuzzyArtParams {
            vigilance: self.vigilance,
            choice: self.alpha,
            learning_rate: self.beta,
            max_epochs: self.epochs,
            ..FuzzyArtParams::default()
        }
    }

    fn km_params(&self, k: usize) -> KMeansParams {
        let mut p = KMeansParams::new(k);
        p.learning_rate = self.learning_rate;
        p
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Baseline {
    Kmeans,
}

#[derive(clap::Args)]
struct ClusterArgs {
    /// Input workload matrix CSV
    #[arg(long)]
    input: PathBuf,
    /// Number of machine groups (cells)
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    flags: ArtFlags,
    /// Also run a comparator on the same input
    #[arg(long, value_enum)]
    baseline: Option<Baseline>,
    /// Directory for report.json, permuted.csv, blocks.txt, network.json
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit the report on stdout as json or csv instead of text
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(clap::Args)]
struct SweepArgs {
    /// Input workload matrix CSV
    #[arg(long)]
    input: PathBuf,
    #[arg(long = "k-min")]
    k_min: usize,
    #[arg(long = "k-max")]
    k_max: usize,
    #[command(flatten)]
    flags: ArtFlags,
    /// Table format on stdout
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write a gnuplot-ready "k mge_percent" data file
    #[arg(long = "plot-data")]
    plot_data: Option<PathBuf>,
    /// Directory for sweep.csv and sweep.json
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyFixtureArgs {
    /// Verify a single reference figure (5, 6 or 7)
    #[arg(long)]
    figure: Option<u8>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Cluster(args) => cmd_cluster(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::VerifyFixture(args) => cmd_verify_fixture(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io { .. }
        | Error::Csv { .. }
        | Error::RaggedRow { .. }
        | Error::NonNumeric { .. }
        | Error::EmptyMatrix
        | Error::NegativeValue { .. }
        | Error::ValueExceedsOne { .. }
        | Error::EmptyMachine { .. }
        | Error::EmptyPart { .. }
        | Error::InvalidParam { .. }
        | Error::KTooLarge { .. }
        | Error::DimensionMismatch { .. } => 2,
        Error::CapacityExhausted { .. } | Error::EmptyCell { .. } | Error::ZeroWorkload => 3,
        Error::NoMatchingCut { .. } | Error::AmbiguousCut { .. } => 4,
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn cmd_cluster(args: &ClusterArgs) -> Result<u8, Error> {
    let art_params = args.flags.art_params();
    art_params.validate()?;
    let km_params = args.flags.km_params(args.k);
    km_params.validate()?;
    let matrix = WorkloadMatrix::load_csv(&args.input, args.flags.normalize)?;

    let started = Instant::now();
    let outcome = pipeline::run_hybrid(&matrix, &art_params, &km_params)?;
    let grouping = metrics::evaluate(&matrix, &outcome.config)?;
    let baseline = match args.baseline {
        Some(Baseline::Kmeans) => {
            let b = pipeline::run_kmeans_baseline(&matrix, args.k, &km_params)?;
            let m = metrics::evaluate(&matrix, &b.config)?;
            Some((b, m))
        }
        None => None,
    };
    let duration_ms = started.elapsed().as_secs_f64() * 1e3;

    let report = RunReport::new(
        &args.input,
        &matrix,
        &outcome,
        grouping.clone(),
        &km_params,
        args.flags.normalize,
        baseline.as_ref().map(|(b, m)| (b, m.clone())),
        duration_ms,
    );

    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        write_file(&dir.join("report.json"), &json)?;
        matrix.permute(&outcome.config)?.save_csv(dir.join("permuted.csv"))?;
        write_file(
            &dir.join("blocks.txt"),
            &render::render_blocks(&matrix, &outcome.config),
        )?;
        let dump = NetworkDump {
            params: outcome.network.params(),
            weights: outcome.network.weights(),
            part_families: &outcome.families,
        };
        write_file(
            &dir.join("network.json"),
            &serde_json::to_string_pretty(&dump).expect("dump serializes"),
        )?;
        eprintln!("wrote {}", dir.display());
    }

    match args.format {
        Some(Format::Json) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
        }
        Some(Format::Csv) => {
            println!("k,cells,ee,voids,mge,mge_percent");
            println!(
                "{},{},{},{},{},{:.2}",
                args.k,
                outcome.config.cells(),
                grouping.ee,
                grouping.voids_total,
                grouping.mge,
                grouping.mge * 100.0
            );
        }
        None => {
            print_cluster_text(&matrix, &outcome, &grouping, baseline.as_ref());
        }
    }
    Ok(0)
}

fn print_cluster_text(
    matrix: &WorkloadMatrix,
    outcome: &pipeline::HybridOutcome,
    grouping: &cellform::GroupingMetrics,
    baseline: Option<&(pipeline::BaselineOutcome, cellform::GroupingMetrics)>,
) {
    let art = outcome.network.params();
    println!(
        "input: {} machines x {} parts",
        matrix.machine_count(),
        matrix.part_count()
    );
    println!(
        "fuzzy ART: vigilance={} alpha={} beta={} -> {} part families in {} epochs",
        art.vigilance,
        art.choice,
        art.learning_rate,
        outcome.families.count(),
        outcome.art_epochs
    );
    println!(
        "k-means: k={} -> {} machine groups in {} passes",
        outcome.kmeans.effective_k,
        outcome.groups.count(),
        outcome.kmeans.passes
    );
    println!("cells: {}", outcome.config.cells());
    for cell in 1..=outcome.config.cells() {
        let machines: Vec<&str> = outcome
            .config
            .machines_in(cell)
            .iter()
            .map(|&i| matrix.machine_labels()[i].as_str())
            .collect();
        let parts: Vec<&str> = outcome
            .config
            .parts_in(cell)
            .iter()
            .map(|&j| matrix.part_labels()[j].as_str())
            .collect();
        println!(
            "  cell {cell}: machines [{}], parts [{}]",
            machines.join(" "),
            parts.join(" ")
        );
    }
    println!(
        "metrics: EE={} voids={} MGE={}",
        grouping.ee,
        grouping.voids_total,
        percent(grouping.mge)
    );
    if let Some((b, m)) = baseline {
        println!(
            "baseline k-means: cells={} EE={} voids={} MGE={}",
            b.config.cells(),
            m.ee,
            m.voids_total,
            percent(m.mge)
        );
    }
    println!();
    print!("{}", render::render_blocks(matrix, &outcome.config));
}

fn cmd_sweep(args: &SweepArgs) -> Result<u8, Error> {
    let art_params = args.flags.art_params();
    art_params.validate()?;
    let km_params = args.flags.km_params(args.k_min.max(1));
    km_params.validate()?;
    let matrix = WorkloadMatrix::load_csv(&args.input, args.flags.normalize)?;
    let sweep = pipeline::sweep_cells(&matrix, args.k_min, args.k_max, &art_params, &km_params)?;

    let csv = sweep_csv(&sweep);
    let json = sweep_json(&sweep);

    match args.format {
        Format::Csv => print!("{csv}"),
        Format::Json => println!("{json}"),
    }
    if let Some(path) = &args.plot_data {
        let mut plot = String::from("# k mge_percent\n");
        for row in &sweep.rows {
            plot.push_str(&format!("{} {:.2}\n", row.k, row.mge * 100.0));
        }
        write_file(path, &plot)?;
    }
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        write_file(&dir.join("sweep.csv"), &csv)?;
        write_file(&dir.join("sweep.json"), &json)?;
        eprintln!("wrote {}", dir.display());
    }
    Ok(0)
}

fn sweep_csv(sweep: &pipeline::SweepOutcome) -> String {
    let mut out = String::from("k,cells,ee,voids,mge,mge_percent,optimal\n");
    for (i, row) in sweep.rows.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},{:.2},{}\n",
            row.k,
            row.cells,
            row.ee,
            row.voids,
            row.mge,
            row.mge * 100.0,
            i == sweep.optimal
        ));
    }
    out
}

fn sweep_json(sweep: &pipeline::SweepOutcome) -> String {
    let rows: Vec<serde_json::Value> = sweep
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            serde_json::json!({
                "k": row.k,
                "cells": row.cells,
                "ee": row.ee,
                "voids": row.voids,
                "mge": row.mge,
                "optimal": i == sweep.optimal,
            })
        })
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({
        "rows": rows,
        "optimal_k": sweep.optimal_row().k,
    }))
    .expect("sweep serializes")
}

fn cmd_verify_fixture(args: &VerifyFixtureArgs) -> Result<u8, Error> {
    let matrix = fixtures::dataset4();
    let references = match args.figure {
        Some(figure) => vec![fixtures::dataset4_reference(figure)?],
        None => fixtures::dataset4_references(),
    };
    let mut all_ok = true;
    for r in &references {
        match metrics::reconstruct_config(
            &matrix,
            &r.row_order,
            &r.col_order,
            r.cells,
            r.target_ee,
            r.target_mge,
            fixtures::MGE_MATCH_TOLERANCE,
        ) {
            Ok(rec) => {
                println!(
                    "figure {} ({} cells): recovered EE={} MGE={} (target {} \u{b1}0.05pp)",
                    r.figure,
                    r.cells,
                    rec.metrics.ee,
                    percent(rec.metrics.mge),
                    percent(r.target_mge)
                );
                println!(
                    "  machine blocks: {}",
                    boundary_string(&r.row_order, &rec.row_cuts, matrix.machine_labels())
                );
                println!(
                    "  part blocks:    {}",
                    boundary_string(&r.col_order, &rec.col_cuts, matrix.part_labels())
                );
            }
            Err(err) => {
                all_ok = false;
                println!(
                    "figure {} ({} cells): FAILED — target EE={} MGE={} not reproducible",
                    r.figure,
                    r.cells,
                    r.target_ee,
                    percent(r.target_mge)
                );
                let candidates =
                    metrics::enumerate_cuts(&matrix, &r.row_order, &r.col_order, r.cells)?;
                for c in metrics::nearest_candidates(&candidates, r.target_ee, r.target_mge, 3) {
                    println!(
                        "  nearest: EE={} MGE={} rows {} / cols {}",
                        c.ee,
                        percent(c.mge),
                        boundary_string(&r.row_order, &c.row_cuts, matrix.machine_labels()),
                        boundary_string(&r.col_order, &c.col_cuts, matrix.part_labels())
                    );
                }
                eprintln!("error: {err}");
            }
        }
    }
    Ok(if all_ok { 0 } else { 4 })
}

fn boundary_string(order: &[usize], cuts: &[usize], labels: &[String]) -> String {
    let mut parts = Vec::new();
    let mut bounds = vec![0];
    bounds.extend_from_slice(cuts);
    bounds.push(order.len());
    for w in bounds.windows(2) {
        let block: Vec<&str> = order[w[0]..w[1]].iter().map(|&i| labels[i].as_str()).collect();
        parts.push(block.join(" "));
    }
    parts.join(" | ")
}
