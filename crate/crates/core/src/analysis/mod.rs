//! Empirical checkers for the energy, density and oscillation estimates on
//! discrete solutions. Every estimate with an unspecified constant is
//! reported through its fitted constant.

mod alternatives;
mod caccioppoli;
mod cascade;
mod log_lemma;
mod measure;
mod report;
mod sobolev;

pub use alternatives::{
    classify_alternative, density_estimate, density_estimates, AlternativeConstants,
    AlternativeTag, Classification, DensityStatement, LateralSetting,
};
pub use caccioppoli::caccioppoli_check;
pub use cascade::{oscillation_cascade, CascadeEntry, CascadeReport, ModulusFit};
pub use log_lemma::log_lemma_check;
pub use measure::MIN_POINTS;
pub use report::{relative_change, InequalityReport, NamedTerm, Verdict};
pub use sobolev::sobolev_check;
