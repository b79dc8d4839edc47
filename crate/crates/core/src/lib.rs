//! A numerical laboratory for the degenerate two-phase Stefan problem with
//! p-Laplacian diffusion.
//!
//! The crate has three layers:
//!
//! * [`model`] and [`solver`]: the mollified-enthalpy regularization and an
//!   implicit finite-element solver for it, with weak-residual and
//!   maximum-principle diagnostics;
//! * [`iteration`] and [`geometry`]: the intrinsic-scaling constants engine
//!   (exponents, the iterated-log modulus, radius and time-scale sequences)
//!   and the cylinders built from it;
//! * [`analysis`] and [`convergence`]: empirical checks of the energy,
//!   density and oscillation estimates on discrete solutions, plus
//!   ε-sweeps.
//!
//! The guide in `book/` walks through each layer with runnable snippets.

// Negated comparisons are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod convergence;
pub mod error;
pub mod geometry;
pub mod io;
pub mod iteration;
pub mod linalg;
pub mod model;
pub mod numeric;
pub mod solver;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/iteration.md")]
    mod iteration {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/convergence.md")]
    mod convergence {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
