//! Numerical laboratory for singular Adams-type inequalities on `R^n`:
//! the truncated exponential Young function, rearrangements, explicit
//! extremal families, lower-bound probes of the sharp suprema, and a
//! mountain-pass solver for the radial `(p, n/2)`-biharmonic problem
//!
//! `Δ²_p u + Δ²_{n/2} u = g(u)/|x|^γ`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod banded;
pub mod cli;
pub mod constants;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod mp;
pub mod poly;
pub mod profile;
pub mod quadrature;
pub mod rearrangement;
pub mod sequences;
pub mod young;

pub use constants::{measures, ConstantSet};
pub use error::{Error, Result};
pub use grid::{make_log_grid, radial_laplacian, GridRef, RadialFunction, RadialGrid};
pub use mp::{mountain_pass_solve, ProblemSpec, SolveReport};
pub use profile::{Radial, Samples};
pub use sequences::PiecewiseRadial;
pub use young::{phi, split_constant, YoungParams};
