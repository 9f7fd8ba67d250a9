//! Criterion benchmarks for ebitsim; see `benches/`.
