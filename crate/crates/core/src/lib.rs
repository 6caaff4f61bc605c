//! Numerical laboratory for infinitely degenerate elliptic operators
//! `div(A ∇u)` with `A = diag(1, f(x₁)²)`: control-ball geometry,
//! functional inequalities, a finite-difference solver with oscillation
//! measurements, and the summability test for continuity.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifier;
pub mod error;
pub mod field;
pub mod geometry;
pub mod grid;
pub mod inequalities;
pub mod jet;
pub mod metric;
pub mod quad;
pub mod random;
pub mod report;
pub mod roots;
pub mod solver;
pub mod sparse;
pub mod suite;

pub use error::{Error, Result};
pub use geometry::Geometry;
