#![allow(clippy::needless_range_loop)]

//! Toolkit for four-dimensional torsion-free GL(2)-structures.
//!
//! Three independent formulations of the torsion-free condition are
//! implemented and cross-checked at desk scale:
//!
//! * the Spencer-cohomology test for coframings `h dx` with `h` valued in a
//!   matrix group ([`hflat`]),
//! * the explicit quasi-linear first-order system in the four group
//!   coordinates `A, B, C, D` ([`pde`]),
//! * the dispersionless Lax pair of commuting vector fields on
//!   `R^4 x R_lambda` ([`lax`]).
//!
//! Supporting modules provide the binary-cubic representation theory
//! ([`gl2`]), exact jet fixtures ([`jets`]), a truncated power-series
//! prolongation solver ([`taylor`]), and the correspondence with fourth-order
//! ODEs ([`ode`]). The [`acceptance`] module bundles the cross-checks into a
//! reproducible, seeded suite.

pub mod acceptance;
pub mod error;
pub mod gl2;
pub mod hflat;
pub mod jets;
pub mod lax;
pub mod linalg;
pub mod ode;
pub mod pde;
pub mod ratpoly;
pub mod sampling;
pub mod series;
pub mod spencer;
pub mod taylor;

pub use error::{Error, Result};
