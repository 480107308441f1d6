//! Benchmark-only crate; see `benches/clustering.rs`.
