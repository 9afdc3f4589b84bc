//! Benchmarks for `cslab`; see `benches/`.
