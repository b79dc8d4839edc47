use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The temperature-to-potential map `β(u) = u + κ·sin(u)`.
///
/// For `κ ∈ [0, 1)` this is an increasing diffeomorphism with
/// `β' ∈ [1-κ, 1+κ]`, hence bi-Lipschitz with constant `1/(1-κ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaMap {
    kappa: f64,
}

impl BetaMap {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&kappa) {
            return Err(Error::invalid(
                "beta_kappa",
                format!("must lie in [0, 1), got {kappa}"),
            ));
        }
        Ok(BetaMap { kappa })
    }

    pub fn identity() -> Self {
        BetaMap { kappa: 0.0 }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Bi-Lipschitz constant `Λ_β = 1/(1-κ)`.
    pub fn lipschitz(&self) -> f64 {
        1.0 / (1.0 - self.kappa)
    }

    pub fn eval(&self, u: f64) -> f64 {
        u + self.kappa * u.sin()
    }

    pub fn deriv(&self, u: f64) -> f64 {
        1.0 + self.kappa * u.cos()
    }

    pub fn second_deriv(&self, u: f64) -> f64 {
        -self.kappa * u.sin()
    }

    /// Inverse map by safeguarded Newton iteration.
    pub fn inverse(&self, w: f64) -> f64 {
        if self.kappa == 0.0 {
            return w;
        }
        // |β(u) - u| ≤ κ, so the root lies in [w - κ, w + κ]
        let (mut lo, mut hi) = (w - self.kappa, w + self.kappa);
        let mut u = w;
        for _ in 0..100 {
            let f = self.eval(u) - w;
            if f == 0.0 {
                return u;
            }
            if f > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let mut next = u - f / self.deriv(u);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - u).abs() <= 1e-16 * (1.0 + u.abs()) {
                return next;
            }
            u = next;
        }
        u
    }
}

impl Default for BetaMap {
    fn default() -> Self {
        BetaMap::identity()
    }
}
