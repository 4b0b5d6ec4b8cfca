//! Minimal surfaces from real-analytic strips.
//!
//! A strip (curve plus unit normal) is carried to the isotropic curve
//! `f(w) = c(w) - i ∫ n(z) × c'(z) dz`, whose real part is the minimal surface
//! containing the curve with that normal. The crate evaluates `f` on
//! rectangular grids and checks symmetry relations of the result numerically.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod bjorling;
pub mod catalog;
pub mod error;
pub mod optimize;
pub mod quadrature;
pub mod registration;
pub mod search;
pub mod strip;
pub mod symmetry;

pub type Vec3 = nalgebra::Vector3<f64>;
pub type CVec3 = nalgebra::Vector3<num_complex::Complex64>;

pub use analytic::{parse_expr, AnalyticExpr, BranchTracker};
pub use error::{Error, EvalError, ParseError, Result};
