use serde::{Deserialize, Serialize};

use super::Cylinder;
use crate::error::{Error, Result};
use crate::model::{GridDomain, Vec2};
use crate::solver::{SpaceBox, TestProfile};

/// The three shrinking families used by the boundary estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    /// `σ_j = (1 + 2^{-j})/16`, for the first two lateral scales.
    Lateral12,
    /// `σ̃_j = (1 + 2^{-j})/4`, for the third lateral scale.
    Lateral3,
    /// `σ_j = (1 + 2^{-j})/4` in space only, over `(0, T⁴)`.
    Initial,
}

impl FamilyKind {
    pub fn sigma(self, j: usize) -> f64 {
        let s = 1.0 + 0.5f64.powi(j as i32);
        match self {
            FamilyKind::Lateral12 => s / 16.0,
            FamilyKind::Lateral3 | FamilyKind::Initial => s / 4.0,
        }
    }

    pub fn limit(self) -> f64 {
        match self {
            FamilyKind::Lateral12 => 1.0 / 16.0,
            FamilyKind::Lateral3 | FamilyKind::Initial => 0.25,
        }
    }
}

/// A base cylinder together with the rule producing its shrinking members.
///
/// Lateral families shrink a backward cylinder `B_r × (t0 - T, t0)` in
/// radius and length. The initial family keeps the window `(0, T⁴)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShrinkFamily {
    pub kind: FamilyKind,
    pub center: Vec2,
    pub radius: f64,
    /// Top of the window for lateral families, `T⁴` for the initial one.
    pub t0: f64,
    /// Base time length `T^i`, or `T⁴` for the initial family.
    pub length: f64,
}

impl ShrinkFamily {
    pub fn lateral(
        kind: FamilyKind,
        center: Vec2,
        radius: f64,
        t0: f64,
        length: f64,
    ) -> Result<Self> {
        if kind == FamilyKind::Initial {
            return Err(Error::invalid(
                "kind",
                "use ShrinkFamily::initial for the initial family",
            ));
        }
        if !(radius > 0.0 && length > 0.0) {
            return Err(Error::invalid(
                "family",
                "radius and length must be positive",
            ));
        }
        Ok(ShrinkFamily {
            kind,
            center,
            radius,
            t0,
            length,
        })
    }

    pub fn initial(center: Vec2, radius: f64, t4: f64) -> Result<Self> {
        if !(radius > 0.0 && t4 > 0.0) {
            return Err(Error::invalid("family", "radius and T4 must be positive"));
        }
        Ok(ShrinkFamily {
            kind: FamilyKind::Initial,
            center,
            radius,
            t0: t4,
            length: t4,
        })
    }

    fn member_length(&self, j: usize) -> f64 {
        match self.kind {
            FamilyKind::Initial => self.length,
            _ => self.kind.sigma(j) * self.length,
        }
    }

    /// Member `j` of the family.
    pub fn cylinder(&self, j: usize) -> Cylinder {
        Cylinder {
            center: self.center,
            t0: self.t0,
            radius: self.kind.sigma(j) * self.radius,
            p: 2.0,
            extent: crate::geometry::TimeExtent::Backward {
                length: self.member_length(j),
            },
        }
    }

    pub fn cutoff(&self, j: usize, dim: usize) -> Cutoff {
        let time_ramp = match self.kind {
            FamilyKind::Initial => None,
            _ => Some((
                self.t0 - self.member_length(j),
                self.t0 - self.member_length(j + 1),
            )),
        };
        Cutoff {
            center: self.center,
            outer: self.kind.sigma(j) * self.radius,
            inner: self.kind.sigma(j + 1) * self.radius,
            time_ramp,
            dim,
            index: j,
            base_radius: self.radius,
            base_length: self.length,
        }
    }
}

fn smoothstep(s: f64) -> (f64, f64) {
    if s <= 0.0 {
        (0.0, 0.0)
    } else if s >= 1.0 {
        (1.0, 0.0)
    } else {
        (s * s * (3.0 - 2.0 * s), 6.0 * s * (1.0 - s))
    }
}

/// A C¹ cutoff equal to one on member `j + 1` and zero on the parabolic boundary of member `j`.
///
/// The profile is the cubic smoothstep in the distance to the center and,
/// for lateral families, in time from the bottom of member `j` to the
/// bottom of member `j + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub center: Vec2,
    pub outer: f64,
    pub inner: f64,
    pub time_ramp: Option<(f64, f64)>,
    pub dim: usize,
    pub index: usize,
    pub base_radius: f64,
    pub base_length: f64,
}

impl Cutoff {
    fn radial(&self, x: Vec2) -> (f64, f64, Vec2) {
        let mut d = [0.0; 2];
        for k in 0..self.dim {
            d[k] = x[k] - self.center[k];
        }
        let rho = d[0].hypot(d[1]);
        let width = self.outer - self.inner;
        let (v, dv) = smoothstep((self.outer - rho) / width);
        (v, -dv / width, d)
    }

    fn temporal(&self, t: f64) -> (f64, f64) {
        match self.time_ramp {
            None => (1.0, 0.0),
            Some((lo, hi)) => {
                let (v, dv) = smoothstep((t - lo) / (hi - lo));
                (v, dv / (hi - lo))
            }
        }
    }

    /// Largest `|Dφ|` of the profile, scaled as `max|Dφ|·r/2^j`.
    pub fn gradient_constant(&self) -> f64 {
        1.5 / (self.outer - self.inner) * self.base_radius / 2f64.powi(self.index as i32)
    }

    /// `max|∂tφ^p|·T/2^j`; zero for time-independent cutoffs.
    pub fn time_constant(&self, p: f64) -> f64 {
        match self.time_ramp {
            None => 0.0,
            Some((lo, hi)) => p * 1.5 / (hi - lo) * self.base_length / 2f64.powi(self.index as i32),
        }
    }

    /// `max|Dφ|·r/2^j` measured from nodal values by difference quotients on `domain`.
    pub fn measured_gradient_constant(&self, domain: &GridDomain) -> f64 {
        let t = self.time_ramp.map(|(_, hi)| hi).unwrap_or(0.0);
        let mut worst: f64 = 0.0;
        for i in domain.closure_nodes() {
            let gi = self.value(domain.coords(i), t);
            for axis in 0..domain.dim() {
                if let Some(k) = domain
                    .neighbor(i, axis, 1)
                    .filter(|&k| domain.in_closure(k))
                {
                    let gk = self.value(domain.coords(k), t);
                    worst = worst.max((gk - gi).abs() / domain.h());
                }
            }
        }
        worst * self.base_radius / 2f64.powi(self.index as i32)
    }
}

impl TestProfile for Cutoff {
    fn value(&self, x: Vec2, t: f64) -> f64 {
        self.radial(x).0 * self.temporal(t).0
    }

    fn gradient(&self, x: Vec2, t: f64) -> Vec2 {
        let (_, dr, d) = self.radial(x);
        let rho = d[0].hypot(d[1]);
        if rho == 0.0 || dr == 0.0 {
            return [0.0, 0.0];
        }
        let s = self.temporal(t).0 * dr / rho;
        [s * d[0], s * d[1]]
    }

    fn time_derivative(&self, x: Vec2, t: f64) -> f64 {
        self.radial(x).0 * self.temporal(t).1
    }

    fn support(&self) -> SpaceBox {
        let r = self.outer;
        let ry = if self.dim == 2 { r } else { 0.0 };
        SpaceBox::new(
            [self.center[0] - r, self.center[1] - ry],
            [self.center[0] + r, self.center[1] + ry],
        )
    }
}
