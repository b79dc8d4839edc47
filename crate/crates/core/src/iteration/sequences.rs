use serde::{Deserialize, Serialize};

use super::{Anchor, ExponentPack};
use crate::error::{Error, Result};
use crate::numeric::LogScalar;

/// One index of the iteration, every quantity in log form.
///
/// `double_log` is `Y_j = ln ln(λ₀R₀/R_j)`, so that `[ϑω_j]^{-1/α} = Y_j`.
/// `step_excess` is the deviation of `ln(R_j/R_{j+1})` from `(ϑ/α)Y_j`;
/// it is exactly zero for sequences built by the formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceEntry {
    pub j: usize,
    pub double_log: f64,
    pub log_radius_ratio: f64,
    pub omega: LogScalar,
    pub tilde_omega: LogScalar,
    pub radius: LogScalar,
    pub time_scale: LogScalar,
    pub step_excess: f64,
}

impl SequenceEntry {
    /// `ln(R_j/R_{j+1})`.
    pub fn step(&self, theta: f64, alpha: f64) -> f64 {
        theta / alpha * self.double_log + self.step_excess
    }
}

/// The sequences `ω_j, ω̃_j, R_j, T_j` for `j = 0..=J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationState {
    pub theta: f64,
    pub tau: f64,
    pub alpha: f64,
    pub p: f64,
    pub r0: f64,
    pub anchor: Anchor,
    pub entries: Vec<SequenceEntry>,
    /// First index whose radius is below the smallest normal `f64`.
    pub below_f64_from: Option<usize>,
    /// Set when the log-form arithmetic itself overflowed and the sequence was cut.
    pub truncated_at: Option<usize>,
}

/// Per-index outcome of the recursion and doubling checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecursionCheck {
    pub j: usize,
    /// `ln(ω_{j+1}/ω_j)`.
    pub recursion_lhs: f64,
    /// `ln(1 - ϑ·exp(-[ϑω_j]^{-1/α}))`.
    pub recursion_rhs: f64,
    /// `(lhs - rhs)/x^k` with `x = exp(-Y_j)` and `k = margin_order`; the sign decides the recursion.
    pub normalized_margin: f64,
    /// Order of the leading nonvanishing term of the margin in `x`.
    pub margin_order: u8,
    pub recursion_pass: bool,
    pub doubling_pass: bool,
    pub pass: bool,
}

fn entry_from(j: usize, y: f64, ell: f64, state: &IterationState, excess: f64) -> SequenceEntry {
    let (theta, tau, alpha, p) = (state.theta, state.tau, state.alpha, state.p);
    let ln_omega = -theta.ln() - alpha * y.ln();
    // [τω]^{-1/α} = (ϑ/τ)^{1/α}·Y
    let ln_tilde = tau.ln() + ln_omega - (theta / tau).powf(1.0 / alpha) * y;
    let ln_r = state.r0.ln() - ell;
    SequenceEntry {
        j,
        double_log: y,
        log_radius_ratio: ell,
        omega: LogScalar::from_ln(ln_omega),
        tilde_omega: LogScalar::from_ln(ln_tilde),
        radius: LogScalar::from_ln(ln_r),
        time_scale: LogScalar::from_ln((1.0 - p) * ln_tilde + p * ln_r),
        step_excess: excess,
    }
}

/// Build the sequences for `j = 0..=J` with the canonical anchor.
pub fn build_sequences(
    exponents: &ExponentPack,
    theta: f64,
    tau: f64,
    r0: f64,
    j_max: usize,
) -> Result<IterationState> {
    if j_max < 1 {
        return Err(Error::invalid("J", "need at least one step"));
    }
    for (name, v) in [("theta", theta), ("tau", tau)] {
        if !(v > 0.0 && v < 0.5) {
            return Err(Error::invalid(
                name,
                format!("must lie in (0, 1/2), got {v}"),
            ));
        }
    }
    if !(r0 > 0.0) {
        return Err(Error::invalid("R0", "must be positive"));
    }
    let alpha = exponents.alpha;
    let anchor = Anchor::canonical(theta, alpha)?;
    let mut state = IterationState {
        theta,
        tau,
        alpha,
        p: exponents.p,
        r0,
        anchor,
        entries: Vec::with_capacity(j_max + 1),
        below_f64_from: None,
        truncated_at: None,
    };
    state.extend_from(0, anchor.ln_ln(), 0.0, j_max);
    state.check_invariants()?;
    Ok(state)
}

impl IterationState {
    fn extend_from(&mut self, start: usize, y0: f64, ell0: f64, j_max: usize) {
        self.entries.truncate(start);
        self.truncated_at = None;
        let (mut y, mut ell) = (y0, ell0);
        for j in start..=j_max {
            if !(y.is_finite() && ell.is_finite()) {
                self.truncated_at = Some(j);
                break;
            }
            let e = entry_from(j, y, ell, self, 0.0);
            self.entries.push(e);
            let step = e.step(self.theta, self.alpha);
            // Y_{j+1} = Y_j + ln(1 + Δ·e^{-Y_j})
            y += (step.ln() - y).exp().ln_1p();
            ell += step;
        }
        self.below_f64_from = self
            .entries
            .iter()
            .position(|e| !(e.radius.value() >= f64::MIN_POSITIVE));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Replace `R_{j+1}` by `factor·R_{j+1}` and rebuild later indices by the formula.
    pub fn scale_radius(&mut self, j_next: usize, factor: f64) -> Result<()> {
        if j_next == 0 || j_next >= self.entries.len() || !(factor > 0.0) {
            return Err(Error::invalid(
                "j",
                "index must address an existing non-initial radius",
            ));
        }
        let j_max = self.entries.len() - 1;
        let prev = self.entries[j_next - 1];
        let excess = prev.step_excess - factor.ln();
        let step = prev.step(self.theta, self.alpha) - prev.step_excess + excess;
        let y = prev.double_log + (step.ln() - prev.double_log).exp().ln_1p();
        self.entries[j_next - 1].step_excess = excess;
        self.extend_from(j_next, y, prev.log_radius_ratio + step, j_max);
        Ok(())
    }

    /// Structural invariants; recursion and doubling are checked by [`verify_recursion`].
    fn check_invariants(&self) -> Result<()> {
        let first = self.entries.first().ok_or_else(|| Error::Invariant {
            index: 0,
            what: "empty sequence".into(),
        })?;
        if (first.omega.value() - 1.0).abs() > 1e-14 {
            return Err(Error::Invariant {
                index: 0,
                what: format!("omega_0 = {} instead of 1", first.omega.value()),
            });
        }
        for w in self.entries.windows(2) {
            let (a, b) = (w[0], w[1]);
            if !(b.radius.ln < a.radius.ln) {
                return Err(Error::Invariant {
                    index: b.j,
                    what: "radius not strictly decreasing".into(),
                });
            }
            if !(b.double_log >= a.double_log) {
                return Err(Error::Invariant {
                    index: b.j,
                    what: "omega increased".into(),
                });
            }
        }
        let report = verify_recursion(self);
        if let Some(bad) = report.iter().find(|e| !e.pass) {
            return Err(Error::Invariant {
                index: bad.j,
                what: format!(
                    "recursion/doubling violated (margin {:e}, doubling {})",
                    bad.normalized_margin, bad.doubling_pass
                ),
            });
        }
        Ok(())
    }

    /// `Q^{j+1} ⊂ Q^j` in radius and in time scale for the first `count` indices.
    pub fn is_nested(&self, count: usize) -> bool {
        self.entries
            .windows(2)
            .take(count)
            .all(|w| w[1].radius.ln < w[0].radius.ln && w[1].time_scale.ln <= w[0].time_scale.ln)
    }

    /// `ln δ̃` from `δ̃^{2-p} = ω̃₀^{1-p}`; undefined (None) when `p = 2`.
    pub fn ln_tilde_delta(&self) -> Option<f64> {
        if self.p == 2.0 {
            return None;
        }
        let first = self.entries.first()?;
        Some((1.0 - self.p) / (2.0 - self.p) * first.tilde_omega.ln)
    }
}

/// Evaluate `ln(ω_{j+1}/ω_j) - ln(1 - ϑ/L_j)` with `x = 1/L_j`, scaled by the
/// power of `x` of its leading term.
///
/// In the regime where `x` is tiny the first-order coefficient comes from
/// the step excess symbolically and the rest from the Taylor expansion, so
/// the sign is exact even when `x` underflows.
fn normalized_recursion_margin(
    theta: f64,
    alpha: f64,
    y: f64,
    step: f64,
    excess: f64,
) -> (f64, f64, f64, u8) {
    let x = (-y).exp();
    let lhs = -alpha * ((step * x).ln_1p() / y).ln_1p();
    let rhs = (-theta * x).ln_1p();
    if x < 1e-4 && step * x < 1e-4 {
        let d1 = -alpha * excess / y;
        let s2 = step * step;
        let d2 = alpha * s2 / (2.0 * y) + alpha * s2 / (2.0 * y * y) + theta * theta / 2.0;
        let d3 = theta.powi(3) / 3.0
            - alpha * s2 * step * (1.0 / (3.0 * y) + 1.0 / (2.0 * y * y) + 1.0 / (3.0 * y.powi(3)));
        if d1 == 0.0 {
            (lhs, rhs, d2 + x * d3, 2)
        } else {
            (lhs, rhs, d1 + x * (d2 + x * d3), 1)
        }
    } else {
        (lhs, rhs, (lhs - rhs) / x, 1)
    }
}

/// Check the recursion `ω_{j+1} ≥ ω_j(1 - ϑexp(-[ϑω_j]^{-1/α}))` and doubling
/// `ω_j ≤ 2ω_{j+1}` at every index, without tolerance.
pub fn verify_recursion(state: &IterationState) -> Vec<RecursionCheck> {
    let (theta, alpha) = (state.theta, state.alpha);
    state
        .entries
        .windows(2)
        .map(|w| {
            let e = w[0];
            let step = e.step(theta, alpha);
            let (lhs, rhs, margin, order) =
                normalized_recursion_margin(theta, alpha, e.double_log, step, e.step_excess);
            let recursion_pass = margin > 0.0;
            let doubling_pass = lhs >= -std::f64::consts::LN_2;
            RecursionCheck {
                j: e.j,
                recursion_lhs: lhs,
                recursion_rhs: rhs,
                normalized_margin: margin,
                margin_order: order,
                recursion_pass,
                doubling_pass,
                pass: recursion_pass && doubling_pass,
            }
        })
        .collect()
}

/// Check a hand-set sequence `ω_0 = 1 ≥ ω_1 ≥ …` in plain arithmetic.
pub fn verify_omega_sequence(
    omegas: &[f64],
    theta: f64,
    alpha: f64,
) -> Result<Vec<RecursionCheck>> {
    if omegas.is_empty() || omegas[0] != 1.0 {
        return Err(Error::invalid("omega_sequence", "must start with 1"));
    }
    if omegas.iter().any(|w| !(*w > 0.0 && *w <= 1.0)) {
        return Err(Error::invalid(
            "omega_sequence",
            "entries must lie in (0, 1]",
        ));
    }
    Ok(omegas
        .windows(2)
        .enumerate()
        .map(|(j, w)| {
            let (a, b) = (w[0], w[1]);
            let lhs = (b / a).ln();
            let rhs = (-theta * (-(theta * a).powf(-1.0 / alpha)).exp()).ln_1p();
            let recursion_pass = b <= a && lhs >= rhs;
            let doubling_pass = a <= 2.0 * b;
            RecursionCheck {
                j,
                recursion_lhs: lhs,
                recursion_rhs: rhs,
                normalized_margin: lhs - rhs,
                margin_order: 0,
                recursion_pass,
                doubling_pass,
                pass: recursion_pass && doubling_pass,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pack(n: usize, p: f64, q: f64) -> ExponentPack {
        ExponentPack::new(n, p, q, 0.5).unwrap()
    }

    #[test]
    fn omega_zero_is_one_and_all_checks_pass() {
        let s = build_sequences(&pack(3, 2.0, 3.0), 0.05, 0.1, 1.0, 20).unwrap();
        assert_eq!(s.entries.len(), 21);
        assert!((s.entries[0].omega.value() - 1.0).abs() < 1e-14);
        let rep = verify_recursion(&s);
        assert_eq!(rep.len(), 20);
        assert!(rep.iter().all(|e| e.pass));
    }

    #[test]
    fn nested_for_small_theta() {
        let s = build_sequences(&pack(3, 2.0, 3.0), 0.1, 0.2, 1.0, 5).unwrap();
        assert!(s.is_nested(5));
    }

    #[test]
    fn single_step_sequence() {
        let s = build_sequences(&pack(2, 3.0, 3.0), 0.1, 0.2, 1.0, 1).unwrap();
        let rep = verify_recursion(&s);
        assert_eq!(rep.len(), 1);
        assert!(rep[0].pass);
    }

    #[test]
    fn halved_radius_breaks_the_recursion() {
        let mut s = build_sequences(&pack(3, 2.0, 3.0), 0.05, 0.1, 1.0, 10).unwrap();
        s.scale_radius(4, 0.5).unwrap();
        let rep = verify_recursion(&s);
        assert!(!rep[3].recursion_pass);
        assert!(rep.iter().enumerate().all(|(i, e)| i == 3 || e.pass));
    }

    #[test]
    fn radius_leaves_f64_after_first_step() {
        let s = build_sequences(&pack(2, 2.0, 3.0), 0.1, 0.2, 1.0, 3).unwrap();
        assert_eq!(s.below_f64_from, Some(1));
        assert!(s.truncated_at.is_none());
    }

    #[test]
    fn tilde_delta_flagged_at_p_two() {
        let s = build_sequences(&pack(3, 2.0, 3.0), 0.05, 0.1, 1.0, 2).unwrap();
        assert!(s.ln_tilde_delta().is_none());
        let s3 = build_sequences(&pack(2, 3.0, 3.0), 0.05, 0.1, 1.0, 2).unwrap();
        let d = s3.ln_tilde_delta().unwrap();
        assert!((d - 2.0 * s3.entries[0].tilde_omega.ln).abs() < 1e-9 * d.abs());
    }

    #[test]
    fn hand_set_sequence_violating_doubling() {
        let rep = verify_omega_sequence(&[1.0, 0.4, 0.3], 0.1, 0.2).unwrap();
        assert!(!rep[0].doubling_pass);
        assert!(!rep[0].pass);
        let ok = verify_omega_sequence(&[1.0, 1.0, 1.0], 0.1, 0.2).unwrap();
        assert!(ok.iter().all(|e| e.pass));
    }
}
