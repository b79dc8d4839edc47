//! The vanishing-width program on a fixed grid: ε-sweeps, uniform Cauchy
//! diagnostics, gradient convergence in measure away from the jump, the
//! near-jump energy and the sizes of the terms in the limit passage.

mod equicontinuity;
mod gradients;
mod near_jump;
mod sweep;

pub use equicontinuity::{equi_modulus_check, EquiModulusEntry, EquiModulusReport};
pub use gradients::{gradient_convergence_in_measure, truncate, GradientMeasureReport};
pub use near_jump::{
    energy_scan, limit_passage_terms, near_flux_scan, near_jump_energy, EnergyScan,
    LimitPassageTerms, NearFluxScan,
};
pub use sweep::{run_sweep, sweep_jobs, SweepResult, SweepRun};
