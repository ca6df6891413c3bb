//! Sparse canonical correlation analysis (SCCA).
//!
//! Given a joint covariance triple `(B, A, C)` and sparsity budgets
//! `(s1, s2)`, SCCA maximizes `x'Ay` subject to `x'Bx <= 1`, `y'Cy <= 1`,
//! `||x||_0 <= s1`, and `||y||_0 <= s2`. This crate provides:
//!
//! - [`linalg`]: dense spectral kernels (symmetric eigendecomposition,
//!   pseudo-inverses and their square roots, largest singular triples,
//!   block positive-semidefiniteness tests),
//! - [`instance`]: the problem data model, JSON persistence, a seeded
//!   planted-instance generator, and sample-covariance estimation,
//! - [`cca`]: the closed-form dense CCA value, the combinatorial subset
//!   objective, big-M magnitude bounds, and support sparsification,
//! - [`heuristics`]: greedy forward selection and swap-based local search,
//! - [`exact`]: a brute-force certification oracle and a branch-and-cut
//!   solver driven by analytical cuts from a closed-form dual eigenvalue,
//! - [`lowrank`]: rank-based constraint elimination and the separable
//!   fast path for rank-one cross-covariance,
//! - [`bench`]: a small benchmarking harness with CSV/markdown output,
//! - [`cli`]: the `scca` command-line front end (`generate`, `solve`,
//!   `bench`).
//!
//! Each major capability has a runnable example under `examples/`.

pub mod bench;
pub mod cca;
pub mod cli;
pub mod error;
pub mod exact;
pub mod heuristics;
pub mod instance;
pub mod linalg;
pub mod lowrank;

pub use error::{Result, ScaError};
