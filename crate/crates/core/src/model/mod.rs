//! The continuous model: the bi-Lipschitz temperature map, the mollified
//! Heaviside and enthalpy, the flux field and grid domains.

mod beta;
mod domain;
mod enthalpy;
mod flux;
mod heaviside;
mod params;

pub use beta::BetaMap;
pub use domain::{DensityEntry, DensityReport, GridDomain, NodeKind, SpatialKind};
pub use enthalpy::EnthalpyMap;
pub use flux::{Coefficient, FieldModuli, ModulusShape, Vec2, VectorField};
pub use heaviside::MollifiedHeaviside;
pub use params::ModelParams;

/// Critical integrability exponent: `1 + n/p` when `p < n`, otherwise 2.
///
/// ```
/// use stefan_lab::model::bar_q;
/// assert_eq!(bar_q(3, 2.0), 2.5);
/// assert_eq!(bar_q(2, 3.0), 2.0);
/// ```
pub fn bar_q(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    if p < nf {
        1.0 + nf / p
    } else {
        2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bar_q_branch_table() {
        assert_eq!(bar_q(3, 2.0), 2.5);
        assert_eq!(bar_q(2, 3.0), 2.0);
        assert_eq!(bar_q(2, 2.0), 2.0);
        assert_eq!(bar_q(1, 2.0), 2.0);
        assert_eq!(bar_q(4, 2.0), 3.0);
        assert!((bar_q(3, 2.5) - 2.2).abs() < 1e-15);
    }
}
