//! k-Prabhakar and k-Hilfer-Prabhakar fractional calculus.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what most callers want.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod dd;
pub mod error;
pub mod kspecial;
pub mod operators;
mod quadrature;
pub mod scalar;
pub mod solvers;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default working precision.
pub type Real = f64;
pub type Params = kspecial::PrabhakarParams<Real>;
pub type Hilfer = kspecial::HilferParams<Real>;
pub type Control = kspecial::SeriesControl<Real>;
pub type Grid = operators::Grid1D<Real>;
pub type Samples = operators::SampledFunction<Real>;
pub type Relaxation = solvers::RelaxationProblem<Real>;
pub type Diffusion = solvers::DiffusionProblem<Real>;
pub type Solution = solvers::SeriesSolution<Real>;
