//! Benchmark harness behind the `moca` binary: runs algorithms on one
//! dataset, scores them against ground truth, and renders a deterministic
//! text report.

pub mod report;

pub use report::{run_benchmark, AlgorithmSpec, BenchConfig, RunOutcome, RunReport};
