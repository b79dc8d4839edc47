//! Implicit solver for the regularized problem `∂t 𝓗(w) = div Ā(x, t, w, Dw)`
//! with Dirichlet data, and diagnostics on its output.

mod config;
mod datum;
mod diagnostics;
mod grid_function;
mod newton;
mod weak;

pub use config::SolveConfig;
pub use datum::BoundaryDatum;
pub use diagnostics::{gradient_field, max_principle_check, nodal_gradient, MaxPrincipleReport};
pub use grid_function::GridFunction;
pub(crate) use newton::elements;
pub use newton::{solve_regularized, NewtonLogEntry, Solution};
pub(crate) use weak::weak_terms_split;
pub use weak::{weak_residual, weak_residual_terms, SpaceBox, TensorBump, TestProfile, WeakTerms};
