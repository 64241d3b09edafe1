//! Benchmarks for `bivar-core`; see `benches/`.
