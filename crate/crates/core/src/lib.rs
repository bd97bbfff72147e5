//! Numerical library for unitary representation tuples on punctured spheres:
//! Lagrangian subspaces as symmetric unitary matrices, the involution that
//! characterizes decomposability into Lagrangian involutions, group-valued
//! momentum maps with their 2-forms on products of conjugacy classes, and a
//! Riemannian multi-start solver for prescribed-class factorization problems.

pub mod config;
pub mod duality;
pub mod error;
pub mod json;
pub mod lagrange;
pub mod numcore;
pub mod qham;
pub mod reps;
pub mod solver;

pub use config::{Config, SolverConfig, Tolerances};
pub use error::{Error, Result};
pub use numcore::{CMat, CVec, EigenDecomposition, RMat};
