//! Benchmarks for the conversion pipeline live in `benches/`.
