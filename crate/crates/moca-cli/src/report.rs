//! Running algorithms and assembling comparison reports.
//!
//! Report text is fully determined by (dataset, config, seeds): keys are
//! emitted in a fixed order, floats with fixed precision, and wall-clock
//! durations are kept out of the document body.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use moca_core::io::assignments_from_csv;
use moca_core::kmeans::kmeans_baseline;
use moca_core::metrics::{score, MetricsReport};
use moca_core::pipeline::{run_moca, NeighborCount, PipelineConfig};
use moca_core::{Dataset, MocaError, Result};

pub const REPORT_SCHEMA: &str = "moca-report/1";

/// One algorithm to benchmark.
#[derive(Debug, Clone)]
pub enum AlgorithmSpec {
    Moca,
    Kmeans,
    /// Pre-computed assignments read from a CSV, scored alongside the rest.
    External { name: String, csv: String },
}

impl AlgorithmSpec {
    pub fn name(&self) -> &str {
        match self {
            AlgorithmSpec::Moca => "moca",
            AlgorithmSpec::Kmeans => "kmeans",
            AlgorithmSpec::External { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub final_clusters: usize,
    pub neighbor_count: NeighborCount,
    pub normalize: bool,
    pub seed: u64,
}

/// The outcome of one algorithm run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub algorithm: String,
    pub config_echo: String,
    pub assignment: Vec<usize>,
    pub metrics: Option<MetricsReport>,
    pub rounds: usize,
    pub duration: Duration,
}

#[derive(Debug)]
pub enum RunOutcome {
    Completed(RunReport),
    Failed { algorithm: String, error: MocaError },
}

fn run_one(data: &Dataset, algo: &AlgorithmSpec, config: &BenchConfig) -> Result<RunReport> {
    let start = Instant::now();
    let (assignment, rounds, config_echo) = match algo {
        AlgorithmSpec::Moca => {
            let mut pc = PipelineConfig::new(config.final_clusters);
            pc.neighbor_count = config.neighbor_count;
            pc.normalize = config.normalize;
            let out = run_moca(data, &pc)?;
            let echo = format!(
                "f={} L={} n0={} normalize={}",
                config.final_clusters, out.l, out.n0, config.normalize
            );
            (out.clustering.assignment(data.len()), out.state.round, echo)
        }
        AlgorithmSpec::Kmeans => {
            let data_owned;
            let input = if config.normalize {
                data_owned = data.min_max_normalize();
                &data_owned
            } else {
                data
            };
            let assignment = kmeans_baseline(input, config.final_clusters, config.seed, 100)?;
            let echo = format!(
                "k={} seed={} normalize={}",
                config.final_clusters, config.seed, config.normalize
            );
            (assignment, 0, echo)
        }
        AlgorithmSpec::External { name, csv } => {
            let assignment = assignments_from_csv(csv)?;
            if assignment.len() != data.len() {
                return Err(MocaError::InvalidParameter {
                    name: "external",
                    reason: format!(
                        "{name} covers {} objects, dataset has {}",
                        assignment.len(),
                        data.len()
                    ),
                });
            }
            (assignment, 0, "external assignments".to_string())
        }
    };
    let metrics = match data.label_ids() {
        Some(truth) => Some(score(&assignment, &truth)?),
        None => None,
    };
    Ok(RunReport {
        algorithm: algo.name().to_string(),
        config_echo,
        assignment,
        metrics,
        rounds,
        duration: start.elapsed(),
    })
}

/// Runs every requested algorithm; a failing algorithm becomes a FAILED
/// row without aborting the others.
pub fn run_benchmark(
    data: &Dataset,
    algorithms: &[AlgorithmSpec],
    config: &BenchConfig,
) -> Vec<RunOutcome> {
    algorithms
        .iter()
        .map(|algo| match run_one(data, algo, config) {
            Ok(report) => RunOutcome::Completed(report),
            Err(error) => RunOutcome::Failed {
                algorithm: algo.name().to_string(),
                error,
            },
        })
        .collect()
}

fn metric_row(name: &str, m: &MetricsReport) -> String {
    format!(
        "{name:<12} {:>8.6} {:>10.6} {:>9.6} {:>9.6} {:>8.6} {:>9.6} {:>8.6}",
        m.purity,
        m.rand_index,
        m.adjusted_rand_index,
        m.precision,
        m.recall,
        m.f_measure,
        m.entropy
    )
}

/// Renders the full benchmark document: schema line, dataset echo, one
/// block per run, and the aligned comparison table.
pub fn render_report(
    dataset_name: &str,
    data: &Dataset,
    outcomes: &[RunOutcome],
    include_assignments: bool,
) -> String {
    let mut out = String::new();
    let classes = data
        .label_ids()
        .map(|ids| ids.iter().max().map_or(0, |&v| v + 1));
    writeln!(out, "schema: {REPORT_SCHEMA}").unwrap();
    writeln!(
        out,
        "dataset: {dataset_name} m={} d={} classes={}",
        data.len(),
        data.dim(),
        classes.map_or("none".to_string(), |c| c.to_string())
    )
    .unwrap();
    out.push('\n');

    for outcome in outcomes {
        match outcome {
            RunOutcome::Completed(r) => {
                writeln!(out, "run: {}", r.algorithm).unwrap();
                writeln!(out, "  config: {}", r.config_echo).unwrap();
                let clusters = r.assignment.iter().max().map_or(0, |&v| v + 1);
                writeln!(out, "  clusters: {clusters}").unwrap();
                writeln!(out, "  rounds: {}", r.rounds).unwrap();
                if let Some(m) = &r.metrics {
                    writeln!(out, "  purity: {:.6}", m.purity).unwrap();
                    writeln!(out, "  rand_index: {:.6}", m.rand_index).unwrap();
                    writeln!(out, "  adjusted_rand_index: {:.6}", m.adjusted_rand_index).unwrap();
                    writeln!(out, "  precision: {:.6}", m.precision).unwrap();
                    writeln!(out, "  recall: {:.6}", m.recall).unwrap();
                    writeln!(out, "  f_measure: {:.6}", m.f_measure).unwrap();
                    writeln!(out, "  entropy: {:.6}", m.entropy).unwrap();
                }
                if include_assignments {
                    let ids: Vec<String> =
                        r.assignment.iter().map(usize::to_string).collect();
                    writeln!(out, "  assignment: {}", ids.join(" ")).unwrap();
                }
            }
            RunOutcome::Failed { algorithm, error } => {
                writeln!(out, "run: {algorithm}").unwrap();
                writeln!(out, "  status: FAILED ({error})").unwrap();
            }
        }
        out.push('\n');
    }

    let any_metrics = outcomes.iter().any(|o| {
        matches!(o, RunOutcome::Completed(r) if r.metrics.is_some())
    });
    if any_metrics {
        writeln!(
            out,
            "{:<12} {:>8} {:>10} {:>9} {:>9} {:>8} {:>9} {:>8}",
            "algorithm", "purity", "rand", "ari", "prec", "recall", "f1", "entropy"
        )
        .unwrap();
        for outcome in outcomes {
            match outcome {
                RunOutcome::Completed(r) => {
                    if let Some(m) = &r.metrics {
                        writeln!(out, "{}", metric_row(&r.algorithm, m)).unwrap();
                    }
                }
                RunOutcome::Failed { algorithm, .. } => {
                    writeln!(out, "{algorithm:<12} FAILED").unwrap();
                }
            }
        }
    }
    out
}
