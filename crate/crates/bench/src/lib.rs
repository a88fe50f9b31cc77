//! Criterion benchmarks for the exact-arithmetic kernels; see `benches/kernels.rs`.
