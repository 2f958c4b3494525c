//! Benchmark harness for the pipeline; see `benches/`.
