use serde::{Deserialize, Serialize};

use super::{bar_q, BetaMap, EnthalpyMap, MollifiedHeaviside, VectorField};
use crate::error::{Error, Result};

/// Every structural and iteration constant of a run.
///
/// `eps1` is `None` when its formula value underflows `f64`; consumers that
/// need it must abstain. `lambda0_ln_ln` stores `ln ln λ₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub p: f64,
    pub lambda: f64,
    pub a: f64,
    pub eps: f64,
    pub delta: f64,
    pub r_omega: f64,
    pub q: f64,
    pub theta: f64,
    pub tau: f64,
    pub eps1: Option<f64>,
    pub eps2: f64,
    pub eps3: f64,
    pub eps4: f64,
    pub lambda0_ln_ln: f64,
    pub r0: f64,
    pub beta_kappa: f64,
    pub mu_reg: f64,
    pub alpha_tilde: f64,
    pub m_tilde: f64,
}

impl ModelParams {
    /// Admissible defaults for dimension `n` and exponents `p`, `q`.
    pub fn new(n: usize, p: f64, q: f64) -> Result<Self> {
        let eps2 = 2f64.powi(-10);
        let theta = 0.05;
        let alpha = 1.0 / (p / (p - 1.0) * q);
        let params = ModelParams {
            n,
            p,
            lambda: 1.0,
            a: 0.0,
            eps: 0.05,
            delta: 0.5,
            r_omega: 0.25,
            q,
            theta,
            tau: 0.1,
            eps1: Some(default_eps1(p, eps2)),
            eps2,
            eps3: 2f64.powf(-3.0 * p),
            eps4: 0.1,
            lambda0_ln_ln: theta.powf(-1.0 / alpha),
            r0: 0.25,
            beta_kappa: 0.0,
            mu_reg: 0.0,
            alpha_tilde: 0.25,
            m_tilde: 1.0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn p_conj(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// `α = 1/(p′q)`.
    pub fn alpha(&self) -> f64 {
        1.0 / (self.p_conj() * self.q)
    }

    pub fn bar_q(&self) -> f64 {
        bar_q(self.n, self.p)
    }

    pub fn beta(&self) -> Result<BetaMap> {
        BetaMap::new(self.beta_kappa)
    }

    pub fn heaviside(&self) -> Result<MollifiedHeaviside> {
        MollifiedHeaviside::new(self.a, self.eps)
    }

    pub fn enthalpy(&self) -> Result<EnthalpyMap> {
        Ok(EnthalpyMap::new(self.heaviside()?))
    }

    pub fn field(&self) -> Result<VectorField> {
        VectorField::p_laplacian(self.p)
    }

    pub fn eps1(&self) -> Result<f64> {
        self.eps1
            .ok_or_else(|| Error::Unrepresentable("eps1 underflows double precision".into()))
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |name: &str, v: f64| -> Result<()> {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must lie in (0, 1), got {v}")))
            }
        };
        if !(1..=3).contains(&self.n) {
            return Err(Error::invalid(
                "n",
                format!("dimension must be 1, 2 or 3, got {}", self.n),
            ));
        }
        if !(self.p >= 2.0 && self.p.is_finite()) {
            return Err(Error::invalid(
                "p",
                format!("must be at least 2, got {}", self.p),
            ));
        }
        if !(self.lambda >= 1.0) {
            return Err(Error::invalid(
                "Lambda",
                format!("must be at least 1, got {}", self.lambda),
            ));
        }
        if !(self.eps > 0.0) {
            return Err(Error::invalid(
                "eps",
                format!("must be positive, got {}", self.eps),
            ));
        }
        open_unit("delta", self.delta)?;
        if !(self.r_omega > 0.0) {
            return Err(Error::invalid("r_Omega", "must be positive"));
        }
        let qbar = self.bar_q();
        if !(self.q > qbar && self.q.is_finite()) {
            return Err(Error::invalid(
                "q",
                format!("must exceed the critical exponent {qbar}, got {}", self.q),
            ));
        }
        for (name, v) in [("theta", self.theta), ("tau", self.tau)] {
            if !(v > 0.0 && v < 0.5) {
                return Err(Error::invalid(
                    name,
                    format!("must lie in (0, 1/2), got {v}"),
                ));
            }
        }
        open_unit("eps2", self.eps2)?;
        open_unit("eps3", self.eps3)?;
        open_unit("eps4", self.eps4)?;
        if let Some(e1) = self.eps1 {
            open_unit("eps1", e1)?;
            let cap = default_eps1(self.p, self.eps2);
            if e1 > cap {
                return Err(Error::invalid(
                    "eps1",
                    format!("must not exceed min(eps2^(p-2), eps2, 2^-10) = {cap:e}, got {e1:e}"),
                ));
            }
        }
        if !(self.lambda0_ln_ln >= 0.0) {
            return Err(Error::invalid("lambda0", "must be at least e"));
        }
        if !(self.r0 > 0.0) {
            return Err(Error::invalid("R0", "must be positive"));
        }
        if !(0.0..1.0).contains(&self.beta_kappa) {
            return Err(Error::invalid("beta_kappa", "must lie in [0, 1)"));
        }
        if !(self.mu_reg >= 0.0) {
            return Err(Error::invalid("mu_reg", "must be nonnegative"));
        }
        open_unit("alpha_tilde", self.alpha_tilde)?;
        if !(self.m_tilde >= 1.0) {
            return Err(Error::invalid("M_tilde", "must be at least 1"));
        }
        Ok(())
    }
}

/// `min(eps2^(p-2), eps2, 2^-10)`.
pub(crate) fn default_eps1(p: f64, eps2: f64) -> f64 {
    let collapse = if p == 2.0 { 1.0 } else { eps2.powf(p - 2.0) };
    collapse.min(eps2).min(2f64.powi(-10))
}
