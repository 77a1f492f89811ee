//! Criterion benchmarks for `laguerre-thresh`; see `benches/`.
