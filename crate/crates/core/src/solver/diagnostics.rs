use serde::{Deserialize, Serialize};

use super::{BoundaryDatum, GridFunction};
use crate::model::{BetaMap, GridDomain, NodeKind, Vec2};

/// Discrete gradient at every node of level `m`; `NaN` outside `Ω̄`.
///
/// Central differences where both neighbours lie in `Ω̄`, otherwise a
/// second-order one-sided stencil, falling back to first order.
pub fn gradient_field(w: &GridFunction, m: usize) -> Vec<Vec2> {
    nodal_gradient(w.domain(), w.level(m))
}

/// [`gradient_field`] for raw nodal values on `domain`.
pub fn nodal_gradient(domain: &GridDomain, vals: &[f64]) -> Vec<Vec2> {
    let d = domain;
    let h = d.h();
    let inside = |n: Option<usize>| n.filter(|&k| d.in_closure(k));
    (0..d.node_count())
        .map(|i| {
            if !d.in_closure(i) {
                return [f64::NAN; 2];
            }
            let mut g = [0.0; 2];
            for (axis, gk) in g.iter_mut().enumerate().take(d.dim()) {
                let fwd = inside(d.neighbor(i, axis, 1));
                let bwd = inside(d.neighbor(i, axis, -1));
                *gk = match (bwd, fwd) {
                    (Some(b), Some(f)) => (vals[f] - vals[b]) / (2.0 * h),
                    (None, Some(f)) => match inside(d.neighbor(f, axis, 1)) {
                        Some(ff) => (-3.0 * vals[i] + 4.0 * vals[f] - vals[ff]) / (2.0 * h),
                        None => (vals[f] - vals[i]) / h,
                    },
                    (Some(b), None) => match inside(d.neighbor(b, axis, -1)) {
                        Some(bb) => (3.0 * vals[i] - 4.0 * vals[b] + vals[bb]) / (2.0 * h),
                        None => (vals[i] - vals[b]) / h,
                    },
                    (None, None) => f64::NAN,
                };
            }
            g
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxPrincipleReport {
    /// `sup |β⁻¹(w)|` over interior nodes at levels `m ≥ 1`, the values the scheme computes.
    pub sup_u: f64,
    /// `sup |g|` over the parabolic boundary nodes.
    pub sup_g: f64,
    /// `sup_g - sup_u`; negative values mean overshoot.
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compare `sup |u|` against the boundary data with slack `10·newton_tol`.
pub fn max_principle_check(
    w: &GridFunction,
    g: &BoundaryDatum,
    beta: &BetaMap,
    newton_tol: f64,
) -> MaxPrincipleReport {
    let d = w.domain();
    let sup_g = g.sup_abs_on_boundary(d);
    let mut sup_u: f64 = 0.0;
    for m in 1..w.level_count() {
        for i in (0..d.node_count()).filter(|&i| d.kind(i, m) == NodeKind::Interior) {
            sup_u = sup_u.max(beta.inverse(w.value(i, m)).abs());
        }
    }
    let tolerance = 10.0 * newton_tol;
    let margin = sup_g - sup_u;
    MaxPrincipleReport {
        sup_u,
        sup_g,
        margin,
        tolerance,
        pass: margin >= -tolerance,
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::GridDomain;

    #[test]
    fn linear_profile_has_exact_gradient() {
        let d = Arc::new(GridDomain::square(0.0, 1.0, 6, 0.1, 0.1).unwrap());
        let w = GridFunction::from_fn(d, |x, _| 2.0 * x[0] - 3.0 * x[1] + 1.0);
        for g in gradient_field(&w, 0) {
            assert!((g[0] - 2.0).abs() < 1e-12 && (g[1] + 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_solution_has_zero_margin() {
        let d = Arc::new(GridDomain::interval(0.0, 1.0, 8, 0.1, 0.05).unwrap());
        let w = GridFunction::constant(Arc::clone(&d), 0.3);
        let r = max_principle_check(
            &w,
            &BoundaryDatum::Constant(0.3),
            &BetaMap::identity(),
            1e-10,
        );
        assert_eq!(r.margin, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn corrupted_node_fails() {
        let d = Arc::new(GridDomain::interval(0.0, 1.0, 8, 0.1, 0.05).unwrap());
        let mut w = GridFunction::constant(Arc::clone(&d), 0.3);
        w.set(4, 1, 1.5);
        let r = max_principle_check(
            &w,
            &BoundaryDatum::Constant(0.3),
            &BetaMap::identity(),
            1e-10,
        );
        assert!(!r.pass);
    }
}
