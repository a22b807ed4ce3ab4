//! Criterion benchmarks for the kernel algorithms live under `benches/`.
