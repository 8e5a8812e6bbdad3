//! Finite-horizon laboratory for shadowing, inverse shadowing, weak inverse
//! shadowing and orbital inverse shadowing of volume-preserving maps on the
//! circle and the 2-torus.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: points, the flat quotient metric, set distances.
//! * [`systems`]: concrete invertible volume-preserving maps and `d_1` estimates.
//! * [`orbits`]: orbit segments, pseudo-orbit validation, delta-methods.
//! * [`shadowing`]: tracking solvers and certified grid-search checkers.
//! * [`hyperbolicity`]: periodic points, Anosov certificates, cone fields.
//! * [`experiments`]: packaged reproductions producing JSON reports.

pub mod error;
pub mod experiments;
pub mod geometry;
pub mod hyperbolicity;
pub mod linalg;
pub mod orbits;
pub mod shadowing;
pub mod systems;

pub use error::{Error, Result};
