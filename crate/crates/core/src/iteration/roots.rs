use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Root `h` of `τh·exp(-[τh]^{-1/α}) = 2ε`.
///
/// The root is carried through `y = (τh)^{-1/α}`, which solves
/// `y + α·ln y = -ln(2ε)`; `y` is kept as an unevaluated sum `y_hi + y_lo`
/// so the defining equation can be checked far below `f64` ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HRoot {
    pub h: f64,
    pub y_hi: f64,
    pub y_lo: f64,
    pub ln_eps: f64,
    pub tau: f64,
    pub alpha: f64,
}

impl HRoot {
    /// `ln(LHS/2ε)` evaluated on the carried representation.
    pub fn log_residual(&self) -> f64 {
        let target = -(std::f64::consts::LN_2 + self.ln_eps);
        log_equation(self.y_hi, self.y_lo, self.alpha, target)
    }

    /// `|LHS/2ε - 1|`.
    pub fn relative_residual(&self) -> f64 {
        self.log_residual().exp_m1().abs()
    }

    /// The same residual recomputed from the rounded `h`; only meaningful when
    /// `2ε` is a normal `f64`, and amplified by the conditioning `1 + y/α`.
    pub fn direct_residual(&self) -> Option<f64> {
        let two_eps = 2.0 * self.ln_eps.exp();
        if !two_eps.is_normal() {
            return None;
        }
        let s = self.tau * self.h;
        Some((s * (-s.powf(-1.0 / self.alpha)).exp() / two_eps - 1.0).abs())
    }

    /// Sensitivity of the log-residual to relative perturbations of `h`.
    pub fn conditioning(&self) -> f64 {
        1.0 + self.y_hi / self.alpha
    }
}

/// `-(y + α ln y) + target`, with `y = hi + lo` and the subtraction done exactly.
fn log_equation(hi: f64, lo: f64, alpha: f64, target: f64) -> f64 {
    // two-sum of target - hi
    let s = target - hi;
    let bb = s - target;
    let err = (target - (s - bb)) + (-hi - bb);
    s + (err - lo) - alpha * (hi.ln() + (lo / hi).ln_1p())
}

/// Solve for `h(ε)` given `ln ε`; usable for `ε` far below the `f64` range.
pub fn h_of_log_eps(ln_eps: f64, tau: f64, alpha: f64) -> Result<HRoot> {
    if !(tau > 0.0 && tau < 1.0) || !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("tau/alpha", "both must lie in (0, 1)"));
    }
    let target = -(std::f64::consts::LN_2 + ln_eps);
    // at τh = 1 the left side equals e^{-1}, its maximum on (0, 1/τ]
    if !(target > 1.0) {
        return Err(Error::NoRoot(format!(
            "2*eps = {:e} is not below the bracket maximum exp(-1) attained at h = 1/tau = {}",
            (-target).exp(),
            1.0 / tau
        )));
    }
    // g(y) = y + α ln y - target is increasing with g(1) < 0 ≤ g(target)
    let (mut lo, mut hi) = (1.0f64, target);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mid + alpha * mid.ln() - target > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let y_hi = if (lo + alpha * lo.ln() - target).abs() <= (hi + alpha * hi.ln() - target).abs() {
        lo
    } else {
        hi
    };
    // one Newton correction in the low word: -r / (1 + α/y)
    let r = log_equation(y_hi, 0.0, alpha, target);
    let mut y_lo = r / (1.0 + alpha / y_hi);
    let r2 = log_equation(y_hi, y_lo, alpha, target);
    y_lo += r2 / (1.0 + alpha / y_hi);
    let h = (-alpha * (y_hi.ln() + (y_lo / y_hi).ln_1p())).exp() / tau;
    Ok(HRoot {
        h,
        y_hi,
        y_lo,
        ln_eps,
        tau,
        alpha,
    })
}

/// Solve for `h(ε)`.
///
/// ```
/// use stefan_lab::iteration::h_of_eps;
/// let r = h_of_eps(1e-8, 0.1, 1.0 / 6.0).unwrap();
/// assert!(r.relative_residual() <= 1e-14);
/// assert!(r.h > 0.0 && r.h <= 10.0);
/// ```
pub fn h_of_eps(eps: f64, tau: f64, alpha: f64) -> Result<HRoot> {
    if !(eps > 0.0) {
        return Err(Error::invalid("eps", "must be positive"));
    }
    h_of_log_eps(eps.ln(), tau, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bisection_oracle_value() {
        // 50-digit reference for τ = 0.1, α = 1/6, ε = 1e-8
        let r = h_of_eps(1e-8, 0.1, 1.0 / 6.0).unwrap();
        assert!((r.h - H_REF).abs() < 1e-13 * H_REF, "{}", r.h);
        assert!(r.relative_residual() <= 1e-14);
        assert!(r.direct_residual().unwrap() <= 1e-13);
    }

    const H_REF: f64 = 6.220_946_116_855_384;

    #[test]
    fn no_root_for_large_eps() {
        assert!(matches!(h_of_eps(0.2, 0.1, 0.2), Err(Error::NoRoot(_))));
    }

    #[test]
    fn far_below_f64_range() {
        let r = h_of_log_eps(-1e7, 0.1, 1.0 / 6.0).unwrap();
        assert!(r.relative_residual() <= 1e-14);
        assert!(r.direct_residual().is_none());
    }

    proptest! {
        #[test]
        fn increasing_in_eps(l1 in -500.0f64..-2.0, d in 1e-3f64..50.0, alpha in 0.05f64..0.45) {
            let a = h_of_log_eps(l1 - d, 0.1, alpha).unwrap();
            let b = h_of_log_eps(l1, 0.1, alpha).unwrap();
            prop_assert!(a.h < b.h);
            prop_assert!(a.relative_residual() <= 1e-13 && b.relative_residual() <= 1e-13);
        }
    }
}
