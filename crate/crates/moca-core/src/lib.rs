//! MOCA-SM: multi-objective clustering driven by singleton congestion
//! games with player-specific costs.
//!
//! Cluster heads are picked where density is highest, then play repeated
//! one-shot games over the unassigned objects; an equilibrium allocation is
//! kept only when it improves the product of R-square and connectivity.
//! The resulting micro-clusters are merged by single linkage down to the
//! requested count and stragglers join their nearest cluster.
//!
//! The crate also ships the external validity metrics, a seeded k-means
//! baseline, Gaussian-blob generation, and CSV I/O used by the `moca` CLI.

pub mod congestion_game;
pub mod data_model;
pub mod error;
pub mod io;
pub mod kmeans;
pub mod metrics;
pub mod objectives;
pub mod pipeline;
pub mod synth;

pub use data_model::{Dataset, DistanceMatrix, KnnTable};
pub use error::{MocaError, Result};
pub use metrics::MetricsReport;
pub use objectives::{Cluster, Clustering, ObjectiveReport};
pub use pipeline::{run_moca, MocaOutcome, NeighborCount, PipelineConfig};
