//! Exact symbolic verification of Koszul-Vinberg structures on affine charts:
//! canonical rational-function arithmetic, the geometric operators built on it,
//! a scenario language, and a registry of checks cross-validated by an
//! independent jet-based numeric oracle.

#![allow(clippy::needless_range_loop)]

pub mod symexpr;
pub mod linalg;
pub mod geometry;
pub mod tangent;
pub mod sampling;
pub mod structures;
pub mod algebra;
pub mod oracle;
pub mod generate;
pub mod dsl;
pub mod checks;
pub mod report;
pub mod runner;
pub mod corpus;
