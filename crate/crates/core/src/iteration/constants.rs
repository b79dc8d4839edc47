use serde::{Deserialize, Serialize};

use super::ExponentPack;
use crate::error::{Error, Result};
use crate::numeric::scaled_ln;

/// Structural constants whose values are not fixed by the theory; they
/// default to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuralConstants {
    pub c_ell: f64,
    pub bar_c: f64,
    pub tilde_c: f64,
}

impl Default for StructuralConstants {
    fn default() -> Self {
        StructuralConstants {
            c_ell: 1.0,
            bar_c: 1.0,
            tilde_c: 1.0,
        }
    }
}

/// Which candidate attains the minimum defining `ε₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Eps1Term {
    Formula,
    Eps2Power,
    Eps2,
    Cap,
}

/// Formula values for `ε₁` and `ε₃`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsConstants {
    pub eps3: f64,
    /// `ln(-ln ε)` of the closed-form candidate for `ε₁`.
    pub eps1_formula_ln_neg_ln: f64,
    /// `ln ε₁` after taking the minimum; may be `-inf` in `f64`.
    pub ln_eps1: f64,
    /// `ε₁` when it is a normal `f64`.
    pub eps1: Option<f64>,
    pub binding: Eps1Term,
}

/// Evaluate `ε₃ = 1/(2^{3p} c_ℓ c̄)` and the minimum defining `ε₁`.
pub fn eps_constants(e: &ExponentPack, c: &StructuralConstants, eps2: f64) -> Result<EpsConstants> {
    if !(e.zeta > 0.0) {
        return Err(Error::Precondition(
            "no absorption exponent: zeta must be positive".into(),
        ));
    }
    if !(c.c_ell >= 1.0 && c.bar_c >= 1.0 && c.tilde_c >= 1.0) {
        return Err(Error::invalid(
            "c_ell/bar_c/tilde_c",
            "structural constants must be at least 1",
        ));
    }
    if !(eps2 > 0.0 && eps2 < 1.0) {
        return Err(Error::invalid("eps2", "must lie in (0, 1)"));
    }
    let p = e.p;
    let ln2 = std::f64::consts::LN_2;
    let ln_eps3 = -(3.0 * p * ln2 + c.c_ell.ln() + c.bar_c.ln());
    let power = 1.0 / p + (2.0 - e.kappa.reciprocal()) / (e.zeta * e.q);
    let inner = c.c_ell.ln() + c.tilde_c.ln() / e.zeta + 4.0 * p / (e.zeta * e.zeta) * ln2
        - power * ln_eps3;
    let formula_ln_neg_ln = e.p_conj * inner;
    let candidates = [
        (-formula_ln_neg_ln.exp(), Eps1Term::Formula),
        (scaled_ln(p - 2.0, eps2.ln()), Eps1Term::Eps2Power),
        (eps2.ln(), Eps1Term::Eps2),
        (-10.0 * ln2, Eps1Term::Cap),
    ];
    let (ln_eps1, binding) =
        candidates
            .iter()
            .copied()
            .fold((f64::INFINITY, Eps1Term::Cap), |acc, c| {
                if c.0 < acc.0 {
                    c
                } else {
                    acc
                }
            });
    let v = ln_eps1.exp();
    Ok(EpsConstants {
        eps3: 1.0 / (2f64.powf(3.0 * p) * c.c_ell * c.bar_c),
        eps1_formula_ln_neg_ln: formula_ln_neg_ln,
        ln_eps1,
        eps1: v.is_normal().then_some(v),
        binding,
    })
}

/// A named smallness condition on `ϑ` or `τ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub name: String,
    /// Log of the quantity required to be at most one (or a slack form `≤ 0`).
    pub log_value: f64,
    pub pass: bool,
}

fn pred(name: &str, log_value: f64) -> Predicate {
    Predicate {
        name: name.to_string(),
        log_value,
        pass: log_value <= 0.0,
    }
}

/// Supremum over `ln ς ∈ [lo, hi]` of a smooth function by grid search plus golden refinement.
fn sup_log_grid<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    let n = 4000;
    let step = (hi - lo) / n as f64;
    let (mut best_x, mut best) = (lo, f(lo));
    for k in 1..=n {
        let x = lo + k as f64 * step;
        let v = f(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let (mut a, mut b) = ((best_x - step).max(lo), (best_x + step).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    best.max(f(0.5 * (a + b)))
}

/// Smallness conditions on `ϑ` and `τ` used to fix the iteration constants.
///
/// The unspecified constant `c(p, α)` in the `ϑ ≤ c·τ^{1/(1-α)}` condition is
/// taken to be one.
pub fn theta_predicates(
    theta: f64,
    tau: f64,
    alpha: f64,
    p: f64,
    eps4: f64,
    alpha_tilde: f64,
    m_tilde: f64,
) -> Vec<Predicate> {
    let ln32 = 32f64.ln();
    let mut out = Vec::with_capacity(6);
    // e^{-1/(3αϑ)} ≤ 1/32
    out.push(pred(
        "ratio_below_1_32",
        -1.0 / (3.0 * alpha * theta) + ln32,
    ));
    out.push(pred("theta_vs_tau", theta.ln() - tau.ln() / (1.0 - alpha)));
    out.push(pred("theta_vs_eps4", theta.ln() - eps4.ln()));
    // 2^{p+3}·exp(p[(2/τ)^{1/α} - (2/(3α))ϑ^{(α-1)/α}]) ≤ 1
    let lateral = (p + 3.0) * std::f64::consts::LN_2
        + p * ((2.0 / tau).powf(1.0 / alpha)
            - 2.0 / (3.0 * alpha) * theta.powf((alpha - 1.0) / alpha));
    out.push(pred("lateral_time_inclusion", lateral));
    // M̃·ϑ^{(p-2)/α̃}·sup_ς ς^{(2-p)/α̃}exp(-ς^{(α-1)/α}/(3α)) ≤ 1
    let initial_sup = sup_log_grid(
        |ls| (2.0 - p) / alpha_tilde * ls - ((alpha - 1.0) / alpha * ls).exp() / (3.0 * alpha),
        -30.0,
        30.0,
    );
    let initial = m_tilde.ln() + scaled_ln((p - 2.0) / alpha_tilde, theta.ln()) + initial_sup;
    out.push(pred("initial_time_inclusion", initial));
    // M̃·S(p,q)·τ^{(p-2)(1+1/α̃)} ≤ 1 with S = sup_{ς<1} ς^{1-(p-2)/α̃}exp(-(p-1)ς^{-1/α})
    let s = sup_log_grid(
        |ls| (1.0 - (p - 2.0) / alpha_tilde) * ls - (p - 1.0) * (-ls / alpha).exp(),
        -30.0,
        0.0,
    );
    let interior = m_tilde.ln() + s + scaled_ln((p - 2.0) * (1.0 + 1.0 / alpha_tilde), tau.ln());
    out.push(pred("interior_time_scales", interior));
    out
}

/// Largest `ϑ = k/1000 < 1/2` passing every predicate.
pub fn auto_theta(
    tau: f64,
    alpha: f64,
    p: f64,
    eps4: f64,
    alpha_tilde: f64,
    m_tilde: f64,
) -> Result<f64> {
    (1..500)
        .rev()
        .map(|k| k as f64 / 1000.0)
        .find(|&t| {
            theta_predicates(t, tau, alpha, p, eps4, alpha_tilde, m_tilde)
                .iter()
                .all(|p| p.pass)
        })
        .ok_or_else(|| {
            Error::Precondition(
                "no theta on the grid k/1000 satisfies the smallness conditions".into(),
            )
        })
}
