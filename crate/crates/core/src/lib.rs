//! Logarithmic potential theory on finite unions of real intervals, weighted
//! Chebyshev polynomials, orthogonal polynomials for generalized Jacobi
//! measures, and numerical checks of sharp Widom-factor bounds.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chebyshev;
pub mod cli;
pub mod error;
pub mod interval_sets;
pub mod numeric;
pub mod orthopoly;
pub mod poly;
pub mod potential;
pub mod preimage;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result};
pub use interval_sets::{affine_map, normalize, Gap, IntervalSet};
pub use potential::{equilibrium, EquilibriumData, PwData};
