use serde_json::json;

use super::measure::{space_mean, space_time_mean, MIN_POINTS};
use super::report::{InequalityReport, NamedTerm};
use crate::error::{Error, Result};
use crate::geometry::Cylinder;
use crate::model::{MollifiedHeaviside, NodeKind};
use crate::solver::{nodal_gradient, GridFunction, TestProfile};

/// Both sides of the boundary energy estimate for `(v - k)₊` on `Q`.
///
/// Left: the two sup-in-time averages (jump part and `L²` part) and the
/// gradient energy of `(v - k)₊φ`. Right: the cutoff-derivative term and
/// the jump term against `(∂tφ^p)₊`. Sup-in-time terms are maxima over
/// the grid levels in `Γ ∩ (0, T]`.
pub fn caccioppoli_check(
    w: &GridFunction,
    q: &Cylinder,
    k: f64,
    phi: &dyn TestProfile,
    jump: &MollifiedHeaviside,
    p: f64,
) -> Result<InequalityReport> {
    let name = "caccioppoli";
    let d = w.domain();
    let points: Vec<(usize, usize)> = q
        .grid_points(d)
        .into_iter()
        .filter(|&(_, m)| m >= 1)
        .collect();
    let sup_datum = q
        .grid_points(d)
        .into_iter()
        .filter(|&(i, m)| {
            matches!(
                d.kind(i, m),
                NodeKind::InitialBoundary | NodeKind::LateralBoundary
            )
        })
        .map(|(i, m)| w.value(i, m))
        .fold(f64::NEG_INFINITY, f64::max);
    if !(k > sup_datum) {
        return Err(Error::Precondition(format!(
            "level below boundary datum: k = {k} but the datum reaches {sup_datum} on the cylinder"
        )));
    }
    if points.len() < MIN_POINTS {
        return Ok(InequalityReport::undecided(
            name,
            format!("{} grid points in the cylinder", points.len()),
        ));
    }
    let (lo, hi) = q.time_window();
    let gamma = hi.min(d.t_final()) - lo.max(0.0);
    let nodes = q.spatial_nodes(d);
    let mut levels: Vec<usize> = points.iter().map(|&(_, m)| m).collect();
    levels.dedup();

    let pos = |i: usize, m: usize| (w.value(i, m) - k).max(0.0);
    let phi_at = |i: usize, m: usize| phi.value(d.coords(i), d.time(m));
    let dt_phi_p = |i: usize, m: usize| {
        let x = d.coords(i);
        let t = d.time(m);
        (p * phi.value(x, t).powf(p - 1.0) * phi.time_derivative(x, t)).max(0.0)
    };

    let mut jump_sup: f64 = 0.0;
    let mut l2_sup: f64 = 0.0;
    let mut energy_sum = 0.0;
    let mut mass = 0.0;
    for &m in &levels {
        let jm = space_mean(d, &nodes, |i| {
            jump.jump_energy(k, w.value(i, m)) * phi_at(i, m).powf(p)
        })
        .unwrap_or(0.0);
        let lm = space_mean(d, &nodes, |i| pos(i, m).powi(2) * phi_at(i, m).powf(p)).unwrap_or(0.0);
        jump_sup = jump_sup.max(jm / gamma);
        l2_sup = l2_sup.max(lm / gamma);
        let product: Vec<f64> = (0..d.node_count())
            .map(|i| {
                if d.in_closure(i) {
                    pos(i, m) * phi_at(i, m)
                } else {
                    0.0
                }
            })
            .collect();
        let grad = nodal_gradient(d, &product);
        for &i in &nodes {
            let g = grad[i];
            energy_sum += d.measure(i) * g[0].hypot(g[1]).powf(p);
            mass += d.measure(i);
        }
    }
    let energy = energy_sum / mass;
    let cutoff_term = space_time_mean(d, &points, |i, m| {
        let g = phi.gradient(d.coords(i), d.time(m));
        pos(i, m).powf(p) * g[0].hypot(g[1]).powf(p) + pos(i, m).powi(2) * dt_phi_p(i, m)
    })
    .unwrap_or(0.0);
    let jump_term = space_time_mean(d, &points, |i, m| {
        jump.jump_energy(k, w.value(i, m)) * dt_phi_p(i, m)
    })
    .unwrap_or(0.0);
    Ok(InequalityReport::from_terms(
        name,
        vec![
            NamedTerm::new("jump_sup", jump_sup),
            NamedTerm::new("l2_sup", l2_sup),
            NamedTerm::new("energy", energy),
        ],
        vec![
            NamedTerm::new("cutoff", cutoff_term),
            NamedTerm::new("jump_time", jump_term),
        ],
        None,
    )
    .with_detail(json!({ "k": k, "points": points.len(), "window_length": gamma })))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::geometry::{FamilyKind, ShrinkFamily};
    use crate::model::GridDomain;

    #[test]
    fn constant_below_level_is_vacuous() {
        let d = Arc::new(GridDomain::interval(0.0, 1.0, 32, 0.5, 0.05).unwrap());
        let w = GridFunction::constant(Arc::clone(&d), 0.2);
        let fam = ShrinkFamily::lateral(FamilyKind::Lateral3, [0.0, 0.0], 0.8, 0.5, 0.4).unwrap();
        let q = fam.cylinder(0);
        let phi = fam.cutoff(0, 1);
        let h = MollifiedHeaviside::new(0.0, 0.05).unwrap();
        let r = caccioppoli_check(&w, &q, 0.3, &phi, &h, 3.0).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.rhs, 0.0);
        assert!(r.verdict.is_pass());
    }

    #[test]
    fn level_below_datum_is_rejected() {
        let d = Arc::new(GridDomain::interval(0.0, 1.0, 16, 0.5, 0.05).unwrap());
        let w = GridFunction::constant(Arc::clone(&d), 0.2);
        let q = Cylinder::backward([0.0, 0.0], 0.5, 0.5, 0.4).unwrap();
        let phi = ShrinkFamily::lateral(FamilyKind::Lateral3, [0.0, 0.0], 0.5, 0.5, 0.4)
            .unwrap()
            .cutoff(0, 1);
        let h = MollifiedHeaviside::new(0.0, 0.05).unwrap();
        assert!(matches!(
            caccioppoli_check(&w, &q, 0.1, &phi, &h, 2.0),
            Err(Error::Precondition(_))
        ));
    }
}
