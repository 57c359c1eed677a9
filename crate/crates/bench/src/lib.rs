//! Criterion benchmarks for the grazelab kernels; see `benches/`.
