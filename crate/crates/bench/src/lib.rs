//! Criterion benchmarks for the asplund toolkit; see `benches/`.
