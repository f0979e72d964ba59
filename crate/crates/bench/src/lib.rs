//! Criterion benchmarks of the equilibrium and segment checks live under `benches/`.
