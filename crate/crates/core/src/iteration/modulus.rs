use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ln_add_exp;

/// The anchor `λ₀ ≥ e`, stored as `ln ln λ₀` because the canonical choice
/// `exp(exp(ϑ^{-1/α}))` has no `f64` representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    ln_ln: f64,
}

impl Anchor {
    pub fn from_value(lambda0: f64) -> Result<Self> {
        if !(lambda0 >= std::f64::consts::E) {
            return Err(Error::invalid(
                "lambda0",
                format!("must be at least e, got {lambda0}"),
            ));
        }
        Ok(Anchor {
            ln_ln: lambda0.ln().ln().max(0.0),
        })
    }

    pub fn from_ln_ln(ln_ln: f64) -> Result<Self> {
        if !(ln_ln >= 0.0 && ln_ln.is_finite()) {
            return Err(Error::invalid(
                "lambda0",
                "ln ln lambda0 must be finite and nonnegative",
            ));
        }
        Ok(Anchor { ln_ln })
    }

    /// `λ₀ = exp(exp(ϑ^{-1/α}))`, the choice that normalizes the modulus at `R₀`.
    pub fn canonical(theta: f64, alpha: f64) -> Result<Self> {
        Anchor::from_ln_ln(theta.powf(-1.0 / alpha))
    }

    pub fn ln_ln(&self) -> f64 {
        self.ln_ln
    }
}

/// `r ↦ (1/ϑ)·[ln ln(λ₀R₀/r)]^{-α}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Modulus {
    pub r0: f64,
    pub theta: f64,
    pub alpha: f64,
    pub anchor: Anchor,
}

impl Modulus {
    pub fn new(r0: f64, theta: f64, alpha: f64, anchor: Anchor) -> Result<Self> {
        if !(r0 > 0.0) {
            return Err(Error::invalid("R0", "must be positive"));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::invalid("theta", "must lie in (0, 1)"));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid("alpha", "must lie in (0, 1)"));
        }
        Ok(Modulus {
            r0,
            theta,
            alpha,
            anchor,
        })
    }

    /// `ln ln(λ₀R₀/r)` from `ell = ln(R₀/r) ≥ 0`.
    pub fn double_log(&self, ell: f64) -> f64 {
        let x = self.anchor.ln_ln;
        if ell <= 0.0 {
            // r ≥ R0: ln(e^X + ell) = X + ln(1 + ell·e^{-X}), defined while ell > -e^X
            let t = ell * (-x).exp();
            return if t > -1.0 { x + t.ln_1p() } else { f64::NAN };
        }
        ln_add_exp(x, ell.ln())
    }

    /// The modulus at radius `r`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::invalid("r", "radius must be positive"));
        }
        self.eval_log_ratio((self.r0 / r).ln())
    }

    /// The modulus at `r = R₀·e^{-ell}`.
    pub fn eval_log_ratio(&self, ell: f64) -> Result<f64> {
        let y = self.double_log(ell);
        if !(y > 0.0) {
            return Err(Error::Precondition(format!(
                "double logarithm ln ln(lambda0 R0 / r) = {y} is not positive; r is too large for lambda0"
            )));
        }
        Ok((-self.theta.ln() - self.alpha * y.ln()).exp())
    }
}

/// Functional form of [`Modulus::eval`] taking `λ₀` as a plain value.
///
/// ```
/// use stefan_lab::iteration::modulus;
/// let w = modulus(0.01, 1.0, 0.1, 1.0 / 6.0, std::f64::consts::E).unwrap();
/// assert!(w > 0.0);
/// ```
pub fn modulus(r: f64, r0: f64, theta: f64, alpha: f64, lambda0: f64) -> Result<f64> {
    if !(r > 0.0 && r <= r0) {
        return Err(Error::invalid("r", "must lie in (0, R0]"));
    }
    Modulus::new(r0, theta, alpha, Anchor::from_value(lambda0)?)?.eval(r)
}
