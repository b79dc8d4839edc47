use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iteration::IterationState;
use crate::model::{GridDomain, NodeKind, Vec2};
use crate::solver::{BoundaryDatum, GridFunction};

/// How a cylinder extends in time around its reference instant `t0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeExtent {
    /// `(t0 - r^p, t0 + r^p)`.
    Symmetric,
    /// `(t0 - ϱ^{2-p} r^p, t0 + ϱ^{2-p} r^p)`.
    Stretched { rho: f64 },
    /// `(t0 - length, t0]`.
    Backward { length: f64 },
    /// Explicit `[lo, hi]`; used when half-lengths leave the `f64` range.
    Window { lo: f64, hi: f64 },
}

/// `B_r(center) × time extent`; membership uses the closed cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cylinder {
    pub center: Vec2,
    pub t0: f64,
    pub radius: f64,
    pub p: f64,
    pub extent: TimeExtent,
}

fn check_radius(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            "radius",
            format!("must be finite and nonnegative, got {r}"),
        ))
    }
}

impl Cylinder {
    pub fn symmetric(center: Vec2, t0: f64, radius: f64, p: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(Cylinder {
            center,
            t0,
            radius,
            p,
            extent: TimeExtent::Symmetric,
        })
    }

    pub fn stretched(center: Vec2, t0: f64, radius: f64, p: f64, rho: f64) -> Result<Self> {
        check_radius(radius)?;
        if !(rho > 0.0) {
            return Err(Error::invalid("rho", "must be positive"));
        }
        Ok(Cylinder {
            center,
            t0,
            radius,
            p,
            extent: TimeExtent::Stretched { rho },
        })
    }

    pub fn backward(center: Vec2, t0: f64, radius: f64, length: f64) -> Result<Self> {
        check_radius(radius)?;
        if !(length >= 0.0) {
            return Err(Error::invalid("length", "must be nonnegative"));
        }
        Ok(Cylinder {
            center,
            t0,
            radius,
            p: 2.0,
            extent: TimeExtent::Backward { length },
        })
    }

    pub fn window(center: Vec2, radius: f64, lo: f64, hi: f64) -> Result<Self> {
        check_radius(radius)?;
        if !(lo <= hi) {
            return Err(Error::invalid("window", "needs lo <= hi"));
        }
        Ok(Cylinder {
            center,
            t0: hi,
            radius,
            p: 2.0,
            extent: TimeExtent::Window { lo, hi },
        })
    }

    /// Closed time interval covered by the cylinder.
    pub fn time_window(&self) -> (f64, f64) {
        let rp = self.radius.powf(self.p);
        match self.extent {
            TimeExtent::Symmetric => (self.t0 - rp, self.t0 + rp),
            TimeExtent::Stretched { rho } => {
                let half = rho.powf(2.0 - self.p) * rp;
                (self.t0 - half, self.t0 + half)
            }
            TimeExtent::Backward { length } => (self.t0 - length, self.t0),
            TimeExtent::Window { lo, hi } => (lo, hi),
        }
    }

    pub fn contains(&self, x: Vec2, t: f64, dim: usize) -> bool {
        let (lo, hi) = self.time_window();
        let d2: f64 = (0..dim).map(|k| (x[k] - self.center[k]).powi(2)).sum();
        d2.sqrt() <= self.radius && t >= lo && t <= hi
    }

    /// `σQ`: radius and the time length both scale by `σ`, anchored at the top for backward cylinders.
    pub fn scaled(&self, sigma: f64) -> Cylinder {
        let (lo, hi) = self.time_window();
        let extent = match self.extent {
            TimeExtent::Backward { length } => TimeExtent::Backward {
                length: sigma * length,
            },
            _ => {
                let half = 0.5 * (hi - lo);
                let mid = 0.5 * (hi + lo);
                TimeExtent::Window {
                    lo: mid - sigma * half,
                    hi: mid + sigma * half,
                }
            }
        };
        Cylinder {
            radius: sigma * self.radius,
            extent,
            ..*self
        }
    }

    /// Nodes of `Ω̄` inside the closed ball.
    pub fn spatial_nodes(&self, domain: &GridDomain) -> Vec<usize> {
        let dim = domain.dim();
        domain
            .closure_nodes()
            .filter(|&i| {
                let x = domain.coords(i);
                let d2: f64 = (0..dim).map(|k| (x[k] - self.center[k]).powi(2)).sum();
                d2.sqrt() <= self.radius
            })
            .collect()
    }

    /// Time levels inside the closed time window.
    pub fn levels(&self, domain: &GridDomain) -> Vec<usize> {
        let (lo, hi) = self.time_window();
        (0..=domain.steps())
            .filter(|&m| {
                let t = domain.time(m);
                t >= lo && t <= hi
            })
            .collect()
    }

    /// Space-time grid points of `Q ∩ Ω̄_T` as `(node, level)` pairs.
    pub fn grid_points(&self, domain: &GridDomain) -> Vec<(usize, usize)> {
        let nodes = self.spatial_nodes(domain);
        self.levels(domain)
            .into_iter()
            .flat_map(|m| nodes.iter().map(move |&i| (i, m)))
            .collect()
    }

    /// True when `other ⊆ self` as closed sets.
    pub fn includes(&self, other: &Cylinder, dim: usize) -> bool {
        let d: f64 = (0..dim)
            .map(|k| (other.center[k] - self.center[k]).powi(2))
            .sum::<f64>()
            .sqrt();
        let (a, b) = self.time_window();
        let (c, e) = other.time_window();
        d + other.radius <= self.radius && a <= c && e <= b
    }
}

/// `max - min` of `w` over the grid points of `Q ∩ Ω̄_T`.
pub fn oscillation(w: &GridFunction, q: &Cylinder) -> Result<f64> {
    let pts = q.grid_points(w.domain());
    if pts.is_empty() {
        return Err(Error::EmptyIntersection(
            "cylinder contains no grid points".into(),
        ));
    }
    let (lo, hi) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(i, m)| {
            let v = w.value(i, m);
            (lo.min(v), hi.max(v))
        });
    Ok(hi - lo)
}

/// Oscillation of the datum over the parabolic-boundary grid points of `Q̄`; zero if there are none.
pub fn boundary_oscillation(
    g: &BoundaryDatum,
    domain: &GridDomain,
    q: &Cylinder,
    map: impl Fn(f64) -> f64,
) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, m) in q.grid_points(domain) {
        if matches!(
            domain.kind(i, m),
            NodeKind::InitialBoundary | NodeKind::LateralBoundary
        ) {
            let v = map(g.eval(domain.coords(i), domain.time(m)));
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if hi >= lo {
        hi - lo
    } else {
        0.0
    }
}

/// Intrinsic cylinders `Q^j` built from an iteration state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntrinsicSequence {
    pub cylinders: Vec<Cylinder>,
    /// Grid points of each `Q^j ∩ Ω̄_T`.
    pub point_counts: Vec<usize>,
    /// First index whose radius is below the mesh width; later cylinders are not resolvable.
    pub terminated_at: Option<usize>,
    pub nested: bool,
}

impl IntrinsicSequence {
    /// Indices usable on the grid.
    pub fn usable(&self) -> usize {
        self.terminated_at.unwrap_or(self.cylinders.len())
    }
}

/// `Q^j = B_{R_j}(x0) × (t0 - T_j, t0 + T_j)` for every entry of `state`.
pub fn intrinsic_cylinder_sequence(
    center: Vec2,
    t0: f64,
    state: &IterationState,
    domain: &GridDomain,
) -> Result<IntrinsicSequence> {
    let mut cylinders = Vec::with_capacity(state.entries.len());
    let mut point_counts = Vec::with_capacity(state.entries.len());
    let mut terminated_at = None;
    for (j, e) in state.entries.iter().enumerate() {
        let r = e.radius.value();
        let half = e.time_scale.value();
        let q = Cylinder::window(center, r, t0 - half, t0 + half)?;
        if terminated_at.is_none() && r < domain.h() {
            terminated_at = Some(j);
        }
        point_counts.push(q.grid_points(domain).len());
        cylinders.push(q);
    }
    let dim = domain.dim();
    // compared in log form too, since radii and times leave the f64 range quickly
    let nested = cylinders.windows(2).all(|w| w[0].includes(&w[1], dim))
        && state
            .entries
            .windows(2)
            .all(|w| w[1].radius.ln < w[0].radius.ln && w[1].time_scale.ln <= w[0].time_scale.ln);
    Ok(IntrinsicSequence {
        cylinders,
        point_counts,
        terminated_at,
        nested,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    #[test]
    fn stretch_one_is_symmetric() {
        for &p in &[2.0, 3.0, 4.5] {
            let a = Cylinder::symmetric([0.3, 0.0], 0.5, 0.2, p).unwrap();
            let b = Cylinder::stretched([0.3, 0.0], 0.5, 0.2, p, 1.0).unwrap();
            assert_eq!(a.time_window(), b.time_window());
        }
        let a = Cylinder::symmetric([0.3, 0.0], 0.5, 0.2, 2.0).unwrap();
        let b = Cylinder::stretched([0.3, 0.0], 0.5, 0.2, 2.0, 0.2).unwrap();
        assert_eq!(a.time_window(), b.time_window());
    }

    #[test]
    fn linear_profile_oscillation() {
        let d = Arc::new(GridDomain::interval(0.0, 1.0, 64, 1.0, 0.25).unwrap());
        let w = GridFunction::from_fn(Arc::clone(&d), |x, _| x[0]);
        let q = Cylinder::symmetric([0.5, 0.0], 0.5, 0.25, 2.0).unwrap();
        let osc = oscillation(&w, &q).unwrap();
        assert!((osc - 0.5).abs() <= d.h());
        let inner = q.scaled(0.5);
        assert!(oscillation(&w, &inner).unwrap() <= osc);
        let c = GridFunction::constant(d, 2.0);
        assert_eq!(oscillation(&c, &q).unwrap(), 0.0);
    }

    #[test]
    fn empty_intersection_is_an_error() {
        let d = GridDomain::interval(0.0, 1.0, 8, 1.0, 0.25).unwrap();
        let w = GridFunction::constant(Arc::new(d), 0.0);
        let q = Cylinder::symmetric([3.0, 0.0], 0.5, 0.1, 2.0).unwrap();
        assert!(matches!(
            oscillation(&w, &q),
            Err(Error::EmptyIntersection(_))
        ));
    }
}
