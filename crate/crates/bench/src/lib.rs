//! Criterion benchmarks for the skewho kernels live under `benches/`.
