use serde::{Deserialize, Serialize};

use super::newton::elements;
use super::GridFunction;
use crate::error::{Error, Result};
use crate::model::{ModelParams, Vec2};

/// Axis-aligned closed box in space; the second axis is ignored in 1D.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceBox {
    pub lo: Vec2,
    pub hi: Vec2,
}

impl SpaceBox {
    pub fn new(lo: Vec2, hi: Vec2) -> Self {
        SpaceBox { lo, hi }
    }

    pub fn contains(&self, x: Vec2, dim: usize) -> bool {
        (0..dim).all(|k| x[k] >= self.lo[k] && x[k] <= self.hi[k])
    }

    pub fn contains_box(&self, other: &SpaceBox, dim: usize) -> bool {
        (0..dim).all(|k| other.lo[k] >= self.lo[k] && other.hi[k] <= self.hi[k])
    }
}

/// A smooth test function in space-time together with its derivatives.
pub trait TestProfile: Send + Sync {
    fn value(&self, x: Vec2, t: f64) -> f64;
    fn gradient(&self, x: Vec2, t: f64) -> Vec2;
    fn time_derivative(&self, x: Vec2, t: f64) -> f64;
    /// A box containing the spatial support at every time.
    fn support(&self) -> SpaceBox;
}

/// `(1 + t)·Π(1 - s_k²)²` with `s_k = (x_k - c_k)/r_k`, zero outside the box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TensorBump {
    pub center: Vec2,
    pub radius: Vec2,
    pub dim: usize,
}

impl TensorBump {
    pub fn new(center: Vec2, radius: Vec2, dim: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::invalid("dim", "must be 1 or 2"));
        }
        if (0..dim).any(|k| !(radius[k] > 0.0)) {
            return Err(Error::invalid("radius", "must be positive"));
        }
        Ok(TensorBump {
            center,
            radius,
            dim,
        })
    }

    fn factors(&self, x: Vec2) -> ([f64; 2], [f64; 2]) {
        let mut f = [1.0; 2];
        let mut df = [0.0; 2];
        for k in 0..self.dim {
            let s = (x[k] - self.center[k]) / self.radius[k];
            if s.abs() < 1.0 {
                let b = 1.0 - s * s;
                f[k] = b * b;
                df[k] = -4.0 * s * b / self.radius[k];
            } else {
                f[k] = 0.0;
            }
        }
        (f, df)
    }

    fn spatial(&self, x: Vec2) -> f64 {
        let (f, _) = self.factors(x);
        f[0] * f[1]
    }
}

impl TestProfile for TensorBump {
    fn value(&self, x: Vec2, t: f64) -> f64 {
        (1.0 + t) * self.spatial(x)
    }

    fn gradient(&self, x: Vec2, t: f64) -> Vec2 {
        let (f, df) = self.factors(x);
        [(1.0 + t) * df[0] * f[1], (1.0 + t) * f[0] * df[1]]
    }

    fn time_derivative(&self, x: Vec2, _t: f64) -> f64 {
        self.spatial(x)
    }

    fn support(&self) -> SpaceBox {
        SpaceBox::new(
            [
                self.center[0] - self.radius[0],
                self.center[1] - self.radius[1],
            ],
            [
                self.center[0] + self.radius[0],
                self.center[1] + self.radius[1],
            ],
        )
    }
}

/// The four pieces of the discrete weak form; they sum to the residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakTerms {
    /// `∫ vφ` at the final time of the window.
    pub terminal: f64,
    /// `-∫ vφ` at the initial time of the window.
    pub initial: f64,
    /// `-∫∫ v ∂tφ`.
    pub time: f64,
    /// `∫∫ ⟨𝓐, Dφ⟩`.
    pub flux: f64,
}

impl WeakTerms {
    pub fn total(&self) -> f64 {
        self.terminal + self.initial + self.time + self.flux
    }
}

pub(crate) fn level_of(w: &GridFunction, t: f64) -> Result<usize> {
    let d = w.domain();
    let m = (t / d.dt()).round();
    if m < 0.0 || m as usize > d.steps() || (m * d.dt() - t).abs() > 1e-9 * d.dt().max(t.abs()) {
        return Err(Error::invalid(
            "window",
            format!("time {t} is not a grid time level"),
        ));
    }
    Ok(m as usize)
}

/// Discrete weak-form terms of `w` tested against `phi` on `window`.
///
/// Space integrals use the lumped nodal mass for the `v` terms and the
/// element centroid for the flux. Time integrals use the midpoint of each
/// step with level averages of `w`.
pub fn weak_residual_terms(
    w: &GridFunction,
    params: &ModelParams,
    phi: &dyn TestProfile,
    window: (f64, f64),
    region: &SpaceBox,
) -> Result<WeakTerms> {
    weak_terms_split(w, params, phi, window, region, |_| false).map(|(t, _)| t)
}

/// As [`weak_residual_terms`], also returning the part of the flux term
/// from elements whose level-averaged mean value satisfies `near`.
pub(crate) fn weak_terms_split(
    w: &GridFunction,
    params: &ModelParams,
    phi: &dyn TestProfile,
    window: (f64, f64),
    region: &SpaceBox,
    near: impl Fn(f64) -> bool,
) -> Result<(WeakTerms, f64)> {
    let d = w.domain();
    let dim = d.dim();
    if !region.contains_box(&phi.support(), dim) {
        return Err(Error::Precondition(
            "test function support is not contained in the region".into(),
        ));
    }
    let (m1, m2) = (level_of(w, window.0)?, level_of(w, window.1)?);
    if m1 >= m2 {
        return Err(Error::invalid("window", "needs t1 < t2"));
    }
    let enthalpy = params.enthalpy()?;
    let field = params.field()?;
    let beta = params.beta()?;
    if !d.is_periodic() {
        for i in d.lateral_nodes() {
            if (m1..=m2).any(|m| phi.value(d.coords(i), d.time(m)) != 0.0) {
                return Err(Error::Precondition(
                    "test function does not vanish on the lateral boundary".into(),
                ));
            }
        }
    }
    let nodes: Vec<usize> = d.closure_nodes().collect();
    let boundary_sum = |m: usize| -> f64 {
        let t = d.time(m);
        nodes
            .iter()
            .map(|&i| d.measure(i) * enthalpy.eval(w.value(i, m)) * phi.value(d.coords(i), t))
            .sum()
    };
    let terminal = boundary_sum(m2);
    let initial = -boundary_sum(m1);
    let els = elements(d);
    let dt = d.dt();
    let mut time = 0.0;
    let mut flux = 0.0;
    let mut near_flux = 0.0;
    let mut mid = vec![0.0; d.node_count()];
    for m in m1..m2 {
        let t_mid = d.time(m) + 0.5 * dt;
        for &i in &nodes {
            mid[i] = 0.5 * (w.value(i, m) + w.value(i, m + 1));
        }
        let mut step_time = 0.0;
        for &i in &nodes {
            let v = 0.5 * (enthalpy.eval(w.value(i, m)) + enthalpy.eval(w.value(i, m + 1)));
            step_time += d.measure(i) * v * phi.time_derivative(d.coords(i), t_mid);
        }
        let mut step_flux = 0.0;
        let mut step_near = 0.0;
        for el in &els {
            let dphi = phi.gradient(el.centroid, t_mid);
            if dphi == [0.0, 0.0] {
                continue;
            }
            let mean = el.mean(&mid);
            let a = field.transformed(&beta, el.centroid, t_mid, mean, el.gradient(&mid), 0.0);
            let pairing = el.size * (a[0] * dphi[0] + a[1] * dphi[1]);
            if near(mean) {
                step_near += pairing;
            } else {
                step_flux += pairing;
            }
        }
        time -= dt * step_time;
        flux += dt * (step_flux + step_near);
        near_flux += dt * step_near;
    }
    Ok((
        WeakTerms {
            terminal,
            initial,
            time,
            flux,
        },
        near_flux,
    ))
}

/// Discrete weak-form residual; zero up to discretization error for solutions.
pub fn weak_residual(
    w: &GridFunction,
    params: &ModelParams,
    phi: &dyn TestProfile,
    window: (f64, f64),
    region: &SpaceBox,
) -> Result<f64> {
    weak_residual_terms(w, params, phi, window, region).map(|t| t.total())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::GridDomain;

    #[test]
    fn bump_derivatives_match_differences() {
        let b = TensorBump::new([0.5, 0.4], [0.3, 0.2], 2).unwrap();
        let x = [0.61, 0.33];
        let e = 1e-6;
        let g = b.gradient(x, 0.2);
        let gx = (b.value([x[0] + e, x[1]], 0.2) - b.value([x[0] - e, x[1]], 0.2)) / (2.0 * e);
        let gy = (b.value([x[0], x[1] + e], 0.2) - b.value([x[0], x[1] - e], 0.2)) / (2.0 * e);
        assert!((g[0] - gx).abs() < 1e-8 && (g[1] - gy).abs() < 1e-8);
        assert_eq!(b.value([0.85, 0.4], 0.0), 0.0);
    }

    #[test]
    fn constant_field_has_zero_residual() {
        let d = Arc::new(GridDomain::interval(0.0, 1.0, 32, 0.2, 0.01).unwrap());
        let w = GridFunction::constant(Arc::clone(&d), 0.37);
        let p = ModelParams::new(1, 3.0, 3.0).unwrap();
        let phi = TensorBump::new([0.5, 0.0], [0.3, 1.0], 1).unwrap();
        let k = SpaceBox::new([0.1, 0.0], [0.9, 0.0]);
        let r = weak_residual(&w, &p, &phi, (0.05, 0.15), &k).unwrap();
        assert!(r.abs() < 1e-10, "{r}");
    }

    #[test]
    fn support_outside_region_is_rejected() {
        let d = Arc::new(GridDomain::interval(0.0, 1.0, 16, 0.2, 0.01).unwrap());
        let w = GridFunction::constant(Arc::clone(&d), 0.0);
        let p = ModelParams::new(1, 2.0, 3.0).unwrap();
        let phi = TensorBump::new([0.5, 0.0], [0.3, 1.0], 1).unwrap();
        let k = SpaceBox::new([0.3, 0.0], [0.7, 0.0]);
        assert!(matches!(
            weak_residual(&w, &p, &phi, (0.0, 0.1), &k),
            Err(Error::Precondition(_))
        ));
    }
}
