use serde_json::json;

use super::measure::{space_mean, MIN_POINTS};
use super::report::{InequalityReport, NamedTerm};
use crate::error::Result;
use crate::geometry::Cylinder;
use crate::iteration::Kappa;
use crate::solver::{nodal_gradient, GridFunction, TestProfile};

/// Both sides of the slice-wise parabolic embedding for `wφ` on `B × Γ`.
///
/// With `κ` infinite the exponent `1/κ` is zero and the detail blob also
/// carries the per-slice sup-norm quotient `‖wφ‖_∞^p / (|B|^{p/n}·mean|D(wφ)|^p)`.
pub fn sobolev_check(
    w: &GridFunction,
    phi: &dyn TestProfile,
    q: &Cylinder,
    kappa: Kappa,
    p: f64,
) -> Result<InequalityReport> {
    let name = "sobolev";
    let d = w.domain();
    let nodes = q.spatial_nodes(d);
    let levels = q.levels(d);
    if nodes.len() * levels.len() < MIN_POINTS {
        return Ok(InequalityReport::undecided(
            name,
            format!("{} nodes over {} levels", nodes.len(), levels.len()),
        ));
    }
    let inv_kappa = kappa.reciprocal();
    let (lo, hi) = q.time_window();
    let gamma = hi - lo;
    let ball: f64 = nodes.iter().map(|&i| d.measure(i)).sum();
    let ball_factor = ball.powf(p / d.dim() as f64);
    let mut lhs_sum = 0.0;
    let mut energy_sum = 0.0;
    let mut l2_sup: f64 = 0.0;
    let mut sup_ratio: f64 = 0.0;
    for &m in &levels {
        let t = d.time(m);
        let product: Vec<f64> = (0..d.node_count())
            .map(|i| {
                if d.in_closure(i) {
                    w.value(i, m) * phi.value(d.coords(i), t)
                } else {
                    0.0
                }
            })
            .collect();
        let grad = nodal_gradient(d, &product);
        let slice_energy =
            space_mean(d, &nodes, |i| grad[i][0].hypot(grad[i][1]).powf(p)).unwrap_or(0.0);
        let slice_lhs = space_mean(d, &nodes, |i| {
            let f = phi.value(d.coords(i), t).max(0.0);
            w.value(i, m).abs().powf(2.0 * (1.0 - inv_kappa) + p) * f.powf(p * (2.0 - inv_kappa))
        })
        .unwrap_or(0.0);
        let slice_l2 = space_mean(d, &nodes, |i| {
            w.value(i, m).powi(2) * phi.value(d.coords(i), t).max(0.0).powf(p)
        })
        .unwrap_or(0.0);
        lhs_sum += slice_lhs;
        energy_sum += slice_energy;
        l2_sup = l2_sup.max(slice_l2);
        if kappa.is_infinite() {
            let sup = nodes
                .iter()
                .map(|&i| product[i].abs())
                .fold(0.0, f64::max)
                .powf(p);
            let den = ball_factor * slice_energy;
            if sup > 0.0 {
                sup_ratio = sup_ratio.max(if den > 0.0 { sup / den } else { f64::INFINITY });
            }
        }
    }
    let count = levels.len() as f64;
    let lhs = lhs_sum / count;
    let energy = energy_sum / count;
    let rhs =
        ball_factor * gamma.powf(1.0 - inv_kappa) * (l2_sup / gamma).powf(1.0 - inv_kappa) * energy;
    let mut detail = json!({
        "ball_measure": ball,
        "window_length": gamma,
        "one_over_kappa": inv_kappa,
        "l2_sup": l2_sup,
        "energy_mean": energy,
    });
    if kappa.is_infinite() {
        detail["sup_norm_ratio"] = json!(sup_ratio);
    }
    Ok(InequalityReport::from_terms(
        name,
        vec![NamedTerm::new("weighted_power_mean", lhs)],
        vec![NamedTerm::new("embedding_bound", rhs)],
        None,
    )
    .with_detail(detail))
}
