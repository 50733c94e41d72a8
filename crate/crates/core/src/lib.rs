//! Low spectrum of the magnetic Neumann Laplacian with closed potentials on metric
//! cylinders and planar annuli, together with the geometric bounds that control it.

// Negated comparisons such as `!(x > 0.0)` also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod expr;
pub mod geometry;
pub mod operator;
pub mod potential;
pub mod quadrature;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
