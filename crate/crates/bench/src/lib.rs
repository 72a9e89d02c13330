//! Criterion benchmarks for geoconc; see `benches/`.
