//! Numerical toolkit for triples in `SO_e(n,1)`: subspace algebra, Lorentz
//! geometry, polar decompositions, parabolic intersections and the Haar
//! density in polar coordinates.

// Negated comparisons are deliberate: they route NaN to the failure branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod lorentz;
pub mod measure;
pub mod parabolic;
pub mod polar;
pub mod subspace;

pub use error::{Error, Result};
