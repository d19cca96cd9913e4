//! Criterion benchmarks for the coxwalls pipeline; see `benches/pipeline.rs`.
//! Run with `cargo bench -p coxwalls-bench`.
