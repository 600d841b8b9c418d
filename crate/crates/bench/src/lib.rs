//! Criterion benchmarks for `comax-core`; see `benches/`.
