//! Cylinders, intrinsic time scales, shrinking families with their cutoffs,
//! the scaling transform and oscillation over grid intersections.

mod cutoff;
mod cylinder;
mod rescale;
mod scales;

pub use cutoff::{Cutoff, FamilyKind, ShrinkFamily};
pub use cylinder::{
    boundary_oscillation, intrinsic_cylinder_sequence, oscillation, Cylinder, IntrinsicSequence,
    TimeExtent,
};
pub use rescale::{rescale_solution, Rescaled};
pub use scales::{initial_time_scale, time_scales, ScaleInputs, TimeScales};
