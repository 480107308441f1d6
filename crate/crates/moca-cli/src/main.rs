//! `moca` command line: cluster one dataset, benchmark algorithms against
//! each other, or generate synthetic blob datasets.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use moca_cli::{run_benchmark, AlgorithmSpec, BenchConfig, RunOutcome};
use moca_core::io::{assignments_to_csv, parse_csv, LabelColumn};
use moca_core::pipeline::NeighborCount;
use moca_core::synth::{generate_gaussian_blobs, parse_blob_list};
use moca_core::{Dataset, MocaError};

#[derive(Parser)]
#[command(name = "moca", about = "Game-theoretic multi-objective clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on one dataset and emit assignments.
    Cluster(ClusterArgs),
    /// Run several algorithms on one dataset and emit a comparison report.
    Bench(BenchArgs),
    /// Generate a labeled Gaussian-blob dataset as CSV.
    Gen(GenArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Input CSV file of numeric features.
    #[arg(long)]
    input: PathBuf,
    /// Label column, by 0-based index or by header name.
    #[arg(long)]
    label_col: Option<String>,
    /// Treat the first line as a header row.
    #[arg(long)]
    header: bool,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset, MocaError> {
        let label = match &self.label_col {
            None => LabelColumn::None,
            Some(s) => match s.parse::<usize>() {
                Ok(i) => LabelColumn::Index(i),
                Err(_) => LabelColumn::Name(s.clone()),
            },
        };
        parse_csv(&self.input, &label, self.header)
    }
}

#[derive(Args)]
struct RunArgs {
    /// Number of final clusters.
    #[arg(long)]
    final_clusters: usize,
    /// Neighbor count: "auto" for the size-based schedule, or an integer.
    #[arg(long, default_value = "auto")]
    l: String,
    /// Min-max normalize features before clustering.
    #[arg(long)]
    normalize: bool,
    /// Seed for the k-means baseline.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl RunArgs {
    fn bench_config(&self) -> Result<BenchConfig, String> {
        let neighbor_count = if self.l == "auto" {
            NeighborCount::Auto
        } else {
            NeighborCount::Fixed(
                self.l
                    .parse::<usize>()
                    .map_err(|_| format!("--l must be \"auto\" or an integer, got {:?}", self.l))?,
            )
        };
        Ok(BenchConfig {
            final_clusters: self.final_clusters,
            neighbor_count,
            normalize: self.normalize,
            seed: self.seed,
        })
    }
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Algorithm to run.
    #[arg(long, default_value = "moca")]
    algorithm: String,
    /// Write assignments here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated algorithm list.
    #[arg(long, default_value = "moca,kmeans")]
    algorithms: String,
    /// Score externally produced assignment CSVs: name=path, repeatable.
    #[arg(long)]
    external: Vec<String>,
    /// Include per-object assignments in the report.
    #[arg(long)]
    assignments: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Blob list: count@c1:c2:...,count@...
    #[arg(long)]
    blobs: String,
    /// Standard deviation shared by all blobs.
    #[arg(long, default_value_t = 0.5)]
    spread: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

fn exit_code_for(err: &MocaError) -> u8 {
    match err {
        MocaError::InvalidParameter { .. } => EXIT_USAGE,
        MocaError::InvalidDataset(_) | MocaError::Csv { .. } | MocaError::Io { .. } => EXIT_DATA,
        MocaError::Internal(_) => EXIT_INTERNAL,
    }
}

fn fail(err: &MocaError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code_for(err))
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), MocaError> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| MocaError::Io {
            path: path.display().to_string(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_algorithms(args: &BenchArgs) -> Result<Vec<AlgorithmSpec>, String> {
    let mut algos = Vec::new();
    for name in args.algorithms.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match name {
            "moca" => algos.push(AlgorithmSpec::Moca),
            "kmeans" => algos.push(AlgorithmSpec::Kmeans),
            other => return Err(format!("unknown algorithm {other:?} (use moca or kmeans)")),
        }
    }
    for ext in &args.external {
        let (name, path) = ext
            .split_once('=')
            .ok_or_else(|| format!("--external expects name=path, got {ext:?}"))?;
        let csv = fs::read_to_string(path)
            .map_err(|e| format!("cannot read external assignments {path:?}: {e}"))?;
        algos.push(AlgorithmSpec::External {
            name: name.to_string(),
            csv,
        });
    }
    if algos.is_empty() {
        return Err("no algorithms requested".into());
    }
    Ok(algos)
}

fn cmd_cluster(args: &ClusterArgs) -> ExitCode {
    let config = match args.run.bench_config() {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let algo = match args.algorithm.as_str() {
        "moca" => AlgorithmSpec::Moca,
        "kmeans" => AlgorithmSpec::Kmeans,
        other => {
            eprintln!("error: unknown algorithm {other:?} (use moca or kmeans)");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let data = match args.data.load() {
        Ok(d) => d,
        Err(e) => return fail(&e),
    };
    let outcomes = run_benchmark(&data, &[algo], &config);
    match &outcomes[0] {
        RunOutcome::Completed(report) => {
            if let Some(m) = &report.metrics {
                eprintln!(
                    "{}: purity={:.4} ari={:.4} ({} rounds, {:?})",
                    report.algorithm, m.purity, m.adjusted_rand_index, report.rounds,
                    report.duration
                );
            }
            match emit(&args.output, &assignments_to_csv(&report.assignment)) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(&e),
            }
        }
        RunOutcome::Failed { error, .. } => fail(error),
    }
}

fn cmd_bench(args: &BenchArgs) -> ExitCode {
    let config = match args.run.bench_config() {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let algos = match parse_algorithms(args) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let data = match args.data.load() {
        Ok(d) => d,
        Err(e) => return fail(&e),
    };
    let dataset_name = args
        .data
        .input
        .file_name()
        .map(|n| n.to_string_lossy().to_string())
        .unwrap_or_else(|| "dataset".to_string());
    let outcomes = run_benchmark(&data, &algos, &config);
    let report = moca_cli::report::render_report(&dataset_name, &data, &outcomes, args.assignments);
    if let Err(e) = emit(&args.output, &report) {
        return fail(&e);
    }
    let worst = outcomes
        .iter()
        .filter_map(|o| match o {
            RunOutcome::Failed { error, .. } => Some(exit_code_for(error)),
            RunOutcome::Completed(_) => None,
        })
        .max();
    match worst {
        None => ExitCode::SUCCESS,
        Some(code) => ExitCode::from(code),
    }
}

fn cmd_gen(args: &GenArgs) -> ExitCode {
    let blobs = match parse_blob_list(&args.blobs, args.spread) {
        Ok(b) => b,
        Err(e) => return fail(&e),
    };
    let data = match generate_gaussian_blobs(&blobs, args.seed) {
        Ok(d) => d,
        Err(e) => return fail(&e),
    };
    let mut csv = String::new();
    for j in 0..data.dim() {
        csv.push_str(&format!("x{j},"));
    }
    csv.push_str("class\n");
    let labels = data.labels().unwrap();
    for (i, label) in labels.iter().enumerate() {
        for v in data.row(i) {
            csv.push_str(&format!("{v},"));
        }
        csv.push_str(label);
        csv.push('\n');
    }
    match emit(&args.output, &csv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Cluster(args) => cmd_cluster(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Gen(args) => cmd_gen(args),
    }
}
