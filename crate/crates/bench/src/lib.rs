//! Criterion benchmarks for the `cobord-core` kernels; see `benches/kernels.rs`.
