//! The constants engine: exponent algebra, the iterated-log modulus, the
//! radius/oscillation sequences, `h(ε)` and the hyper-geometric lemma.
//!
//! Quantities that leave the `f64` range after one step are carried in log
//! form; see [`crate::numeric::LogScalar`].

mod constants;
mod exponents;
mod lemma;
mod modulus;
mod roots;
mod sequences;

pub use constants::{
    auto_theta, eps_constants, theta_predicates, Eps1Term, EpsConstants, Predicate,
    StructuralConstants,
};
pub use exponents::{kappa_of, ExponentPack, Kappa};
pub use lemma::{hypergeometric_iteration, hypergeometric_iteration_ln, LemmaOutcome};
pub use modulus::{modulus, Anchor, Modulus};
pub use roots::{h_of_eps, h_of_log_eps, HRoot};
pub use sequences::{
    build_sequences, verify_omega_sequence, verify_recursion, IterationState, RecursionCheck,
    SequenceEntry,
};
