use serde_json::json;

use super::measure::{space_mean, MIN_POINTS};
use super::report::{InequalityReport, NamedTerm, Verdict};
use crate::error::{Error, Result};
use crate::geometry::Cylinder;
use crate::model::Vec2;
use crate::solver::GridFunction;

/// Level-set fractions near the initial boundary against `c/ln(1/θ)`.
///
/// On `Q = (B_r ∩ Ω) × (0, T⁴)`, for each `θ` and each open-window level
/// `τ`, measures the fraction of `B_{r/2} ∩ Ω` where
/// `v(·, τ) ≥ sup_Q v - θω/8`. The fitted constant is the largest
/// `fraction·ln(1/θ)`; the per-`θ` maxima go to `refinement_series`.
pub fn log_lemma_check(
    w: &GridFunction,
    center: Vec2,
    radius: f64,
    t4: f64,
    omega: f64,
    thetas: &[f64],
) -> Result<InequalityReport> {
    let name = "log_lemma";
    if let Some(t) = thetas.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
        return Err(Error::invalid(
            "theta",
            format!("must lie in (0, 1), got {t}"),
        ));
    }
    if !(omega > 0.0) {
        return Err(Error::invalid("omega", "must be positive"));
    }
    let d = w.domain();
    let q = Cylinder::window(center, radius, 0.0, t4)?;
    let pts = q.grid_points(d);
    if pts.is_empty() {
        return Err(Error::EmptyIntersection(
            "initial cylinder has no grid points".into(),
        ));
    }
    let sup_q = pts
        .iter()
        .map(|&(i, m)| w.value(i, m))
        .fold(f64::NEG_INFINITY, f64::max);
    let sup_initial = q
        .spatial_nodes(d)
        .iter()
        .map(|&i| w.value(i, 0))
        .fold(f64::NEG_INFINITY, f64::max);
    if sup_initial > sup_q - omega / 8.0 {
        return Err(Error::Precondition(format!(
            "initial datum reaches {sup_initial}, above sup - omega/8 = {}",
            sup_q - omega / 8.0
        )));
    }
    let half = Cylinder::window(center, radius / 2.0, 0.0, t4)?.spatial_nodes(d);
    let levels: Vec<usize> = (0..=d.steps())
        .filter(|&m| d.time(m) > 0.0 && d.time(m) < t4)
        .collect();
    if half.len() * levels.len() < MIN_POINTS {
        return Ok(InequalityReport::undecided(
            name,
            format!("{} nodes over {} levels", half.len(), levels.len()),
        ));
    }
    let mut per_theta = Vec::with_capacity(thetas.len());
    let mut worst = (0.0, 0.0, 1.0);
    for &theta in thetas {
        let level = sup_q - theta * omega / 8.0;
        let log_inv = (1.0 / theta).ln();
        let mut best: f64 = 0.0;
        for &m in &levels {
            let frac = space_mean(d, &half, |i| if w.value(i, m) >= level { 1.0 } else { 0.0 })
                .unwrap_or(0.0);
            let c = frac * log_inv;
            if c > best {
                best = c;
            }
            if c > worst.0 {
                worst = (c, frac, 1.0 / log_inv);
            }
        }
        per_theta.push(best);
    }
    let (fitted, frac, bound) = worst;
    let mut r = InequalityReport::from_terms(
        name,
        vec![NamedTerm::new("fraction", frac)],
        vec![NamedTerm::new("inverse_log", bound)],
        None,
    );
    r.fitted_constant = fitted;
    r.verdict = Verdict::from_bool(fitted.is_finite());
    r.refinement_series = per_theta;
    Ok(r.with_detail(json!({
        "sup_q": sup_q,
        "sup_initial": sup_initial,
        "thetas": thetas,
        "levels": levels.len(),
    })))
}
