use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::integrate;

const PANELS: usize = 256;

/// Cumulative integral of the standard bump `C·exp(-1/(1-s²))` on `[-1, 1]`,
/// sampled at `PANELS + 1` equispaced nodes, with limited Hermite slopes.
struct CdfTable {
    values: Vec<f64>,
    slopes: Vec<f64>,
}

fn bump(s: f64) -> f64 {
    let t = 1.0 - s * s;
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

fn table() -> &'static CdfTable {
    static TABLE: OnceLock<CdfTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let step = 2.0 / PANELS as f64;
        let mut raw = vec![0.0; PANELS + 1];
        for k in 0..PANELS {
            let lo = -1.0 + k as f64 * step;
            raw[k + 1] = raw[k] + integrate(bump, lo, lo + step, 1, 16);
        }
        let total = raw[PANELS];
        let mut values: Vec<f64> = raw.iter().map(|v| v / total).collect();
        // enforce F(-s) = 1 - F(s) exactly
        let sym: Vec<f64> = (0..=PANELS)
            .map(|k| 0.5 * (values[k] + 1.0 - values[PANELS - k]))
            .collect();
        values = sym;
        values[0] = 0.0;
        values[PANELS] = 1.0;
        let mut slopes: Vec<f64> = (0..=PANELS)
            .map(|k| bump(-1.0 + k as f64 * step) / total)
            .collect();
        // Fritsch–Carlson limiter keeps every panel monotone
        for k in 0..PANELS {
            let secant = (values[k + 1] - values[k]) / step;
            if secant <= 0.0 {
                slopes[k] = 0.0;
                slopes[k + 1] = 0.0;
                continue;
            }
            let a = slopes[k] / secant;
            let b = slopes[k + 1] / secant;
            let r2 = a * a + b * b;
            if r2 > 9.0 && !hermite_is_monotone(a, b) {
                let t = 3.0 / r2.sqrt();
                slopes[k] = t * a * secant;
                slopes[k + 1] = t * b * secant;
            }
        }
        CdfTable { values, slopes }
    })
}

/// Exact monotonicity region of a cubic Hermite panel in normalized slopes.
fn hermite_is_monotone(a: f64, b: f64) -> bool {
    let s = a + b - 2.0;
    if s <= 0.0 || 2.0 * a + b - 3.0 <= 0.0 || a + 2.0 * b - 3.0 <= 0.0 {
        return true;
    }
    let t = 2.0 * a + b - 3.0;
    a - t * t / (3.0 * s) >= 0.0
}

/// Standard CDF and density at `z ∈ [-1, 1]` from the Hermite interpolant.
fn unit_cdf(z: f64) -> (f64, f64) {
    if z <= -1.0 {
        return (0.0, 0.0);
    }
    if z >= 1.0 {
        return (1.0, 0.0);
    }
    let t = table();
    let step = 2.0 / PANELS as f64;
    let pos = (z + 1.0) / step;
    let k = (pos.floor() as usize).min(PANELS - 1);
    let s = pos - k as f64;
    let (y0, y1) = (t.values[k], t.values[k + 1]);
    let (m0, m1) = (t.slopes[k] * step, t.slopes[k + 1] * step);
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let value = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
    let d00 = 6.0 * s2 - 6.0 * s;
    let d10 = 3.0 * s2 - 4.0 * s + 1.0;
    let d01 = -6.0 * s2 + 6.0 * s;
    let d11 = 3.0 * s2 - 2.0 * s;
    let deriv = (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / step;
    (value.clamp(0.0, 1.0), deriv.max(0.0))
}

/// The Heaviside step at `a` smoothed by a bump of half-width `ε`.
///
/// Its derivative is supported in `(a-ε, a+ε)` and integrates to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollifiedHeaviside {
    a: f64,
    eps: f64,
}

impl MollifiedHeaviside {
    pub fn new(a: f64, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::invalid(
                "eps",
                format!("width must be positive, got {eps}"),
            ));
        }
        if !a.is_finite() {
            return Err(Error::invalid("a", "jump level must be finite"));
        }
        Ok(MollifiedHeaviside { a, eps })
    }

    pub fn center(&self) -> f64 {
        self.a
    }

    pub fn width(&self) -> f64 {
        self.eps
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s <= self.a - self.eps {
            0.0
        } else if s >= self.a + self.eps {
            1.0
        } else {
            unit_cdf((s - self.a) / self.eps).0
        }
    }

    pub fn deriv(&self, s: f64) -> f64 {
        if s <= self.a - self.eps || s >= self.a + self.eps {
            0.0
        } else {
            unit_cdf((s - self.a) / self.eps).1 / self.eps
        }
    }

    /// Mollifier density `ρ_ε(s - a)`, the exact bump (not the interpolant).
    pub fn density(&self, s: f64) -> f64 {
        static TOTAL: OnceLock<f64> = OnceLock::new();
        let total = *TOTAL.get_or_init(|| integrate(bump, -1.0, 1.0, PANELS, 16));
        bump((s - self.a) / self.eps) / (total * self.eps)
    }

    /// `∫_k^v H'(ξ)(ξ - k)₊ dξ`, zero when `v ≤ k`.
    pub fn jump_energy(&self, k: f64, v: f64) -> f64 {
        if v <= k {
            return 0.0;
        }
        let lo = k.max(self.a - self.eps);
        let hi = v.min(self.a + self.eps);
        if hi <= lo {
            return 0.0;
        }
        integrate(|x| self.deriv(x) * (x - k), lo, hi, 32, 8)
    }

    /// True when `s` lies in the open transition layer `(a-ε, a+ε)`.
    pub fn in_layer(&self, s: f64) -> bool {
        (s - self.a).abs() < self.eps
    }

    /// The same step seen after dividing temperatures by `λ`.
    pub fn rescaled(&self, lambda: f64) -> Result<Self> {
        MollifiedHeaviside::new(self.a / lambda, self.eps / lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn support_endpoints_and_midpoint() {
        let h = MollifiedHeaviside::new(0.3, 0.05).unwrap();
        assert_eq!(h.eval(0.25), 0.0);
        assert_eq!(h.eval(0.35), 1.0);
        assert!((h.eval(0.3) - 0.5).abs() < 1e-10);
    }

    #[test]
    fn derivative_integrates_to_one() {
        let h = MollifiedHeaviside::new(-1.0, 0.2).unwrap();
        let total = integrate(|s| h.deriv(s), -1.2, -0.8, 512, 8);
        assert!((total - 1.0).abs() < 1e-8, "{total}");
        let exact = integrate(|s| h.density(s), -1.2, -0.8, 512, 8);
        assert!((exact - 1.0).abs() < 1e-10);
    }

    #[test]
    fn interpolant_tracks_the_exact_cdf() {
        let h = MollifiedHeaviside::new(0.0, 1.0).unwrap();
        for i in 0..200 {
            let s = -1.0 + (i as f64 + 0.37) / 100.0;
            let exact = integrate(|x| h.density(x), -1.0, s, 64, 16);
            // cubic Hermite error peaks in the steep tails of the bump
            assert!(
                (h.eval(s) - exact).abs() < 5e-9,
                "s = {s}: {} vs {exact}",
                h.eval(s)
            );
        }
    }

    #[test]
    fn jump_energy_closed_form_above_layer() {
        // for k below the layer and v above it the integral is E[ξ] - k = a - k
        let h = MollifiedHeaviside::new(0.5, 0.1).unwrap();
        let e = h.jump_energy(0.0, 2.0);
        assert!((e - 0.5).abs() < 1e-8, "{e}");
        assert_eq!(h.jump_energy(1.0, 0.5), 0.0);
    }

    proptest! {
        #[test]
        fn monotone(a in -2.0f64..2.0, eps in 1e-3f64..1.0, s in -3.0f64..3.0, ds in 0.0f64..0.5) {
            let h = MollifiedHeaviside::new(a, eps).unwrap();
            prop_assert!(h.eval(s) <= h.eval(s + ds));
            prop_assert!((0.0..=1.0).contains(&h.eval(s)));
            prop_assert!(h.deriv(s) >= 0.0);
        }

        #[test]
        fn derivative_vanishes_off_layer(a in -2.0f64..2.0, eps in 1e-3f64..1.0, d in 1.0f64..3.0) {
            let h = MollifiedHeaviside::new(a, eps).unwrap();
            prop_assert_eq!(h.deriv(a + d * eps), 0.0);
            prop_assert_eq!(h.deriv(a - d * eps), 0.0);
        }
    }
}
