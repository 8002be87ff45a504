//! Criterion benchmarks for the contagion solvers; see `benches/solvers.rs`.
