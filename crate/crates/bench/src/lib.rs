//! Criterion harnesses for the hot kernels live under `benches/`.
