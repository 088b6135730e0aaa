//! Criterion benchmarks for the lamina kernels; see `benches/`.
