//! Criterion benchmarks for the `cubetight` library; see `benches/`.
