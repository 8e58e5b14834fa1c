//! Birkhoff-James orthogonality and its semi-norm generalization in
//! finite-dimensional real vector spaces.
//!
//! The crate provides:
//! - evaluable norm / semi-norm descriptions ([`spaces`]),
//! - constructive per-direction representatives and sphere discretizations
//!   ([`admissible`]),
//! - vector-level orthogonality tests along independent routes ([`ortho`]),
//! - operator-level induced semi-norms, attainment sets, and orthogonality
//!   routes ([`operators`]),
//! - a seeded cross-validation harness pinning the relationships between
//!   those routes as executable checks ([`verify`]).
//!
//! Every decision is a [`tol::TriState`]: a verdict plus the normalized
//! margin it was derived from, with an explicit indeterminate band.

pub mod admissible;
pub mod error;
pub mod operators;
pub mod ortho;
pub mod search;
pub mod spaces;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
pub use tol::{GuardBand, TriState, Verdict};
