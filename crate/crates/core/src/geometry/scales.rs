use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numeric::{scaled_ln, LogScalar};

/// Exponents and smallness parameters entering the lateral time scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleInputs {
    pub p: f64,
    pub q: f64,
    /// `ln ε₁`; kept in log form because the formula value of `ε₁` underflows.
    pub ln_eps1: f64,
    pub eps2: f64,
}

impl ScaleInputs {
    pub fn new(p: f64, q: f64, eps1: f64, eps2: f64) -> Self {
        ScaleInputs {
            p,
            q,
            ln_eps1: eps1.ln(),
            eps2,
        }
    }

    pub fn from_params(params: &ModelParams) -> Result<Self> {
        let eps1 = params.eps1.ok_or_else(|| {
            Error::Unrepresentable("eps1 underflows f64; time scales need an explicit value".into())
        })?;
        Ok(ScaleInputs::new(params.p, params.q, eps1, params.eps2))
    }
}

/// `ω̃` and the chain `T¹ ≤ ω̃^{2-p}r^p ≤ T² ≤ T³`, all in log form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeScales {
    pub tilde_omega: LogScalar,
    pub t1: LogScalar,
    pub t_mid: LogScalar,
    pub t2: LogScalar,
    pub t3: LogScalar,
}

impl TimeScales {
    /// `ω̃ < ε₁ω/2`, checked in log form.
    pub fn tilde_below_half(&self, ln_eps1_omega: f64) -> bool {
        self.tilde_omega.ln < ln_eps1_omega - std::f64::consts::LN_2
    }
}

/// The three lateral time scales for oscillation `omega` on radius `r`.
///
/// Each comparison of the chain is made on the `ω`-dependent factor only,
/// since the common `r^p` cancels and would only add rounding.
pub fn time_scales(omega: f64, r: f64, s: &ScaleInputs) -> Result<TimeScales> {
    if !(omega > 0.0 && omega <= 1.0) {
        return Err(Error::invalid(
            "omega",
            format!("must lie in (0, 1], got {omega}"),
        ));
    }
    if !(r > 0.0) {
        return Err(Error::invalid("r", "must be positive"));
    }
    if !(s.eps2 > 0.0 && s.eps2 < 1.0) {
        return Err(Error::invalid("eps2", "must lie in (0, 1)"));
    }
    if !(s.ln_eps1 < 0.0) {
        return Err(Error::invalid("eps1", "must lie in (0, 1)"));
    }
    let p = s.p;
    if s.ln_eps1 > scaled_ln(p - 2.0, s.eps2.ln()) {
        return Err(Error::invalid("eps1", "must not exceed eps2^(p-2)"));
    }
    let p_conj = p / (p - 1.0);
    let ln_e1w = s.ln_eps1 + omega.ln();
    let ln_tilde = ln_e1w - (-p_conj * s.q * ln_e1w).exp();
    let ln_rp = p * r.ln();
    let f1 = scaled_ln(2.0 - p, ln_e1w);
    let f_mid = scaled_ln(2.0 - p, ln_tilde);
    let f2 = scaled_ln(2.0 - p, s.eps2.ln() + ln_tilde);
    let f3 = (1.0 - p) * ln_tilde;
    let chain = [f1, f_mid, f2, f3];
    if let Some(k) = chain.windows(2).position(|w| !(w[0] <= w[1])) {
        return Err(Error::Invariant {
            index: k,
            what: format!("time-scale ordering fails between T{} and T{}", k, k + 1),
        });
    }
    let at = |f: f64| LogScalar::from_ln(f + ln_rp);
    Ok(TimeScales {
        tilde_omega: LogScalar::from_ln(ln_tilde),
        t1: at(f1),
        t_mid: at(f_mid),
        t2: at(f2),
        t3: at(f3),
    })
}

/// `T⁴ = min{ω^{2-p} r^p, T}`.
pub fn initial_time_scale(omega: f64, r: f64, t_final: f64, p: f64) -> Result<f64> {
    if !(omega > 0.0 && r > 0.0 && t_final > 0.0) {
        return Err(Error::invalid(
            "initial_time_scale",
            "omega, r and T must be positive",
        ));
    }
    let intrinsic = (scaled_ln(2.0 - p, omega.ln()) + p * r.ln()).exp();
    Ok(intrinsic.min(t_final))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_growth_collapses_scales() {
        let s = ScaleInputs::new(2.0, 3.0, 0.01, 0.1);
        let t = time_scales(0.5, 0.3, &s).unwrap();
        let rp = 0.3f64.powi(2);
        assert_eq!(t.t1.value(), t.t2.value());
        assert!((t.t1.value() - rp).abs() < 1e-16);
        assert!(t.t3.value() >= rp);
    }

    #[test]
    fn reference_triple() {
        // ω = 1, ε₁ = ε₂ = 0.1, p = q = 3, r = 1
        let s = ScaleInputs::new(3.0, 3.0, 0.1, 0.1);
        let t = time_scales(1.0, 1.0, &s).unwrap();
        assert!((t.t1.value() - 10.0).abs() < 1e-12);
        // ln ω̃ = ln 0.1 - 0.1^{-4.5}
        let ln_tilde = 0.1f64.ln() - 0.1f64.powf(-4.5);
        assert!((t.tilde_omega.ln - ln_tilde).abs() < 1e-9);
        assert!((t.t2.ln - (-(0.1f64.ln() + ln_tilde))).abs() < 1e-9);
        assert!((t.t3.ln - (-2.0 * ln_tilde)).abs() < 1e-9);
        assert!(t.tilde_below_half(0.1f64.ln()));
    }

    #[test]
    fn initial_scale_examples() {
        assert_eq!(initial_time_scale(0.5, 0.5, 10.0, 4.0).unwrap(), 0.25);
        assert_eq!(initial_time_scale(0.5, 0.5, 1e-3, 4.0).unwrap(), 1e-3);
        assert!((initial_time_scale(0.3, 0.5, 10.0, 2.0).unwrap() - 0.25).abs() < 1e-16);
    }

    #[test]
    fn eps1_above_power_is_rejected() {
        let s = ScaleInputs::new(3.0, 3.0, 0.5, 0.1);
        assert!(time_scales(1.0, 1.0, &s).is_err());
    }
}
