//! Criterion benchmarks for `csp-core`; see `benches/`.
