//! Numerical verification of curvature identities on Hermitian and
//! Kähler–Einstein model manifolds.
//!
//! The pipeline runs bottom-up: [`models`] supplies chart metrics written
//! over [`jet`] arithmetic, [`geometry`] turns metric jets into
//! frame-indexed curvature, [`hermitian`] adds the complex structure,
//! [`fiber`] integrates polynomials over unit-sphere fibers exactly, and
//! [`gray`] evaluates gradients of `H` and the operator `L`. [`suite`]
//! bundles the checks into named suites that emit [`report`] records.

pub mod cli;
pub mod error;
pub mod fiber;
pub mod geometry;
pub mod gray;
pub mod hermitian;
pub mod jet;
pub mod linalg;
pub mod models;
pub mod poly;
pub mod report;
pub mod suite;

pub use error::{Error, Result};
