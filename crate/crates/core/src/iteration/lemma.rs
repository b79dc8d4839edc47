use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Result of iterating `A_{j+1} = C·b^j·A_j^{1+ζ}` in log form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaOutcome {
    /// `ln A_j` for `j = 0..=J`.
    pub ln_sequence: Vec<f64>,
    /// `ln` of `C^{-1/ζ}·b^{-1/ζ²}`.
    pub ln_threshold: f64,
    /// `A_J ≤ A_0·2^{-J}`.
    pub converged: bool,
    /// `A_J > A_0`.
    pub diverged: bool,
    /// `A_j ≤ A_0·b^{-j/ζ}` at every index; meaningful when `A_0` is below the threshold.
    pub within_decay_bound: bool,
}

impl LemmaOutcome {
    pub fn threshold(&self) -> f64 {
        self.ln_threshold.exp()
    }
}

/// Iterate the recursion for `J` steps.
///
/// ```
/// use stefan_lab::iteration::hypergeometric_iteration;
/// let out = hypergeometric_iteration(1.0, 1.0, 1.0, 0.5, 5).unwrap();
/// // A_j = (1/2)^(2^j)
/// assert!((out.ln_sequence[3] - 8.0 * 0.5f64.ln()).abs() < 1e-12);
/// assert!(out.converged);
/// ```
pub fn hypergeometric_iteration(
    c: f64,
    b: f64,
    zeta: f64,
    a0: f64,
    steps: usize,
) -> Result<LemmaOutcome> {
    if !(zeta > 0.0) {
        return Err(Error::Precondition(
            "no absorption exponent: zeta must be positive".into(),
        ));
    }
    if !(c >= 1.0 && b >= 1.0) {
        return Err(Error::invalid("C/b", "both must be at least 1"));
    }
    if !(a0 >= 0.0) {
        return Err(Error::invalid("A0", "must be nonnegative"));
    }
    hypergeometric_iteration_ln(c.ln(), b.ln(), zeta, a0.ln(), steps)
}

/// Log-form entry point; `ln_a0` may be `-inf`.
pub fn hypergeometric_iteration_ln(
    ln_c: f64,
    ln_b: f64,
    zeta: f64,
    ln_a0: f64,
    steps: usize,
) -> Result<LemmaOutcome> {
    if !(zeta > 0.0) {
        return Err(Error::Precondition(
            "no absorption exponent: zeta must be positive".into(),
        ));
    }
    let ln_threshold = -ln_c / zeta - ln_b / (zeta * zeta);
    let mut seq = Vec::with_capacity(steps + 1);
    seq.push(ln_a0);
    let mut within = true;
    for j in 0..steps {
        let prev = seq[j];
        let next = ln_c + j as f64 * ln_b + (1.0 + zeta) * prev;
        let next = if prev == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            next
        };
        let bound = ln_a0 - (j + 1) as f64 * ln_b / zeta;
        // relative slack of a few ulps for the equality case A_0 = threshold
        if next > bound + 1e-12 * bound.abs().max(1.0) {
            within = false;
        }
        seq.push(next);
    }
    let last = *seq.last().expect("nonempty");
    let steps_f = steps as f64;
    let converged = ln_a0 == f64::NEG_INFINITY || last <= ln_a0 - steps_f * std::f64::consts::LN_2;
    Ok(LemmaOutcome {
        ln_sequence: seq,
        ln_threshold,
        converged,
        diverged: last > ln_a0,
        within_decay_bound: within,
    })
}
