use std::fmt;
use std::sync::Arc;

use crate::model::{GridDomain, NodeKind, Vec2};

type DatumFn = Arc<dyn Fn(Vec2, f64) -> f64 + Send + Sync>;

/// Dirichlet data `g` on the parabolic boundary, extended to the whole
/// space-time box so it can also seed initial values.
#[derive(Clone)]
pub enum BoundaryDatum {
    Constant(f64),
    /// `offset + ⟨slope, x⟩`.
    Affine {
        offset: f64,
        slope: Vec2,
    },
    /// `offset + amplitude·|x - center|^exponent`.
    Holder {
        offset: f64,
        amplitude: f64,
        exponent: f64,
        center: Vec2,
    },
    /// `offset + slope·x₁ + amplitude·e^{-rate·t}·Π sin(kπx_i)` (product over the used axes).
    SeparableSine {
        offset: f64,
        slope: f64,
        amplitude: f64,
        rate: f64,
        wavenumber: f64,
        dim: usize,
    },
    /// Cold everywhere at `t = 0`, rising linearly to `hot` by `rise_time`.
    Ramp {
        cold: f64,
        hot: f64,
        rise_time: f64,
    },
    /// Any continuous function; no modulus is available for it.
    Custom(DatumFn),
}

impl fmt::Debug for BoundaryDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryDatum::Constant(c) => write!(f, "Constant({c})"),
            BoundaryDatum::Affine { offset, slope } => write!(f, "Affine({offset}, {slope:?})"),
            BoundaryDatum::Holder {
                offset,
                amplitude,
                exponent,
                center,
            } => write!(f, "Holder({offset}, {amplitude}, {exponent}, {center:?})"),
            BoundaryDatum::SeparableSine {
                offset,
                slope,
                amplitude,
                rate,
                wavenumber,
                dim,
            } => write!(
                f,
                "SeparableSine({offset}, {slope}, {amplitude}, {rate}, {wavenumber}, {dim})"
            ),
            BoundaryDatum::Ramp {
                cold,
                hot,
                rise_time,
            } => write!(f, "Ramp({cold}, {hot}, {rise_time})"),
            BoundaryDatum::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl BoundaryDatum {
    /// The exact heat-equation mode `e^{-π²t}·sin(πx)` on `(0, 1)`.
    pub fn heat_mode() -> Self {
        let pi = std::f64::consts::PI;
        BoundaryDatum::SeparableSine {
            offset: 0.0,
            slope: 0.0,
            amplitude: 1.0,
            rate: pi * pi,
            wavenumber: 1.0,
            dim: 1,
        }
    }

    pub fn custom(f: impl Fn(Vec2, f64) -> f64 + Send + Sync + 'static) -> Self {
        BoundaryDatum::Custom(Arc::new(f))
    }

    pub fn eval(&self, x: Vec2, t: f64) -> f64 {
        match self {
            BoundaryDatum::Constant(c) => *c,
            BoundaryDatum::Affine { offset, slope } => offset + slope[0] * x[0] + slope[1] * x[1],
            BoundaryDatum::Holder {
                offset,
                amplitude,
                exponent,
                center,
            } => {
                let d = ((x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2)).sqrt();
                offset + amplitude * d.powf(*exponent)
            }
            BoundaryDatum::SeparableSine {
                offset,
                slope,
                amplitude,
                rate,
                wavenumber,
                dim,
            } => {
                let k = wavenumber * std::f64::consts::PI;
                let prod: f64 = x.iter().take(*dim).map(|xi| (k * xi).sin()).product();
                offset + slope * x[0] + amplitude * (-rate * t).exp() * prod
            }
            BoundaryDatum::Ramp {
                cold,
                hot,
                rise_time,
            } => cold + (hot - cold) * (t / rise_time).min(1.0),
            BoundaryDatum::Custom(f) => f(x, t),
        }
    }

    /// A concave modulus `ω_g` in the space-time distance, when one is known.
    pub fn modulus(&self, r: f64) -> Option<f64> {
        let r = r.max(0.0);
        match self {
            BoundaryDatum::Constant(_) => Some(0.0),
            BoundaryDatum::Affine { slope, .. } => Some((slope[0].hypot(slope[1])) * r),
            // ||a|^γ - |b|^γ| ≤ |a - b|^γ
            BoundaryDatum::Holder {
                amplitude,
                exponent,
                ..
            } => Some(amplitude.abs() * r.powf(*exponent)),
            BoundaryDatum::SeparableSine {
                slope,
                amplitude,
                rate,
                wavenumber,
                dim,
                ..
            } => {
                let k = wavenumber * std::f64::consts::PI;
                let lx = slope.abs() + amplitude.abs() * k * (*dim as f64).sqrt();
                let lt = amplitude.abs() * rate.abs();
                Some(lx.hypot(lt) * r)
            }
            BoundaryDatum::Ramp {
                cold,
                hot,
                rise_time,
            } => Some((hot - cold).abs() / rise_time * r),
            BoundaryDatum::Custom(_) => None,
        }
    }

    /// `(min, max)` of `g` over the parabolic-boundary grid nodes.
    pub fn range_on_boundary(&self, domain: &GridDomain) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for m in 0..=domain.steps() {
            let t = domain.time(m);
            for i in 0..domain.node_count() {
                match domain.kind(i, m) {
                    NodeKind::InitialBoundary | NodeKind::LateralBoundary => {
                        let v = self.eval(domain.coords(i), t);
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                    _ => {}
                }
            }
        }
        (lo, hi)
    }

    /// `sup |g|` over the parabolic-boundary grid nodes.
    pub fn sup_abs_on_boundary(&self, domain: &GridDomain) -> f64 {
        let (lo, hi) = self.range_on_boundary(domain);
        lo.abs().max(hi.abs())
    }
}
