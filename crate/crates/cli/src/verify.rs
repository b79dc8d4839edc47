//! `verify-constants`: the iteration constants and their recursions, without solving.

use serde_json::json;
use stefan_lab::analysis::{InequalityReport, Verdict};
use stefan_lab::geometry::{time_scales, ScaleInputs};
use stefan_lab::io::real;
use stefan_lab::iteration::{
    build_sequences, h_of_eps, hypergeometric_iteration_ln, theta_predicates,
    verify_omega_sequence, verify_recursion, Anchor, Modulus, RecursionCheck,
};
use stefan_lab::Error;

use crate::config::Resolved;
use crate::error::CliError;
use crate::output::{plain_report, Output};

const HEADER: [&str; 8] = [
    "j",
    "omega_j",
    "tilde_omega_j",
    "R_j",
    "T_j",
    "recursion_lhs",
    "recursion_rhs",
    "pass",
];

fn recursion_report(entries: &[RecursionCheck], hand_set: bool) -> InequalityReport {
    let failures: Vec<&RecursionCheck> = entries.iter().filter(|e| !e.pass).collect();
    let min_margin = entries
        .iter()
        .map(|e| e.normalized_margin)
        .fold(f64::INFINITY, f64::min);
    let detail = json!({
        "hand_set": hand_set,
        "steps": entries.len(),
        "min_normalized_margin": min_margin,
        "recursion_failures": failures.iter().filter(|e| !e.recursion_pass).map(|e| e.j).collect::<Vec<_>>(),
        "doubling_failures": failures.iter().filter(|e| !e.doubling_pass).map(|e| e.j).collect::<Vec<_>>(),
    });
    plain_report(
        "recursion_and_doubling",
        failures.len() as f64,
        0.0,
        Verdict::from_bool(failures.is_empty()),
        detail,
    )
}

fn modulus_report(r: &Resolved) -> Result<InequalityReport, CliError> {
    let c = &r.constants;
    let anchor = Anchor::from_ln_ln(c.lambda0_ln_ln)?;
    let m = Modulus::new(r.params.r0, c.theta, c.alpha, anchor)?;
    let at_r0 = m.eval(r.params.r0)?;
    let canonical = r.config.constants.lambda0.value().is_none();
    let verdict = if canonical {
        Verdict::from_bool((at_r0 - 1.0).abs() <= 1e-14)
    } else {
        Verdict::Undecided
    };
    Ok(plain_report(
        "modulus_anchor",
        at_r0,
        1.0,
        verdict,
        json!({ "canonical_anchor": canonical, "ln_ln_lambda0": c.lambda0_ln_ln }),
    ))
}

fn h_report(r: &Resolved) -> Result<InequalityReport, CliError> {
    let eps = r.params.eps;
    match h_of_eps(eps, r.params.tau, r.constants.alpha) {
        Ok(root) => {
            let residual = root.relative_residual();
            Ok(plain_report(
                "h_of_eps",
                residual,
                1e-13,
                Verdict::from_bool(residual <= 1e-13),
                json!({ "eps": eps, "h": root.h }),
            ))
        }
        Err(Error::NoRoot(reason)) => Ok(InequalityReport::undecided("h_of_eps", reason)),
        Err(e) => Err(e.into()),
    }
}

/// The lemma with `C = 2^p·max(c_ℓc̄, 1)`, `b = 2^p` and the absorption exponent of the run.
fn lemma_report(r: &Resolved) -> Result<InequalityReport, CliError> {
    let p = r.params.p;
    let s = &r.config.constants;
    let ln_c = p * std::f64::consts::LN_2 + (s.c_ell * s.bar_c).max(1.0).ln();
    let ln_b = p * std::f64::consts::LN_2;
    let zeta = r.exponents.zeta;
    let steps = 30;
    let probe = hypergeometric_iteration_ln(ln_c, ln_b, zeta, 0.0, 0)?;
    let below = hypergeometric_iteration_ln(
        ln_c,
        ln_b,
        zeta,
        probe.ln_threshold - std::f64::consts::LN_2,
        steps,
    )?;
    let above =
        hypergeometric_iteration_ln(ln_c, ln_b, zeta, probe.ln_threshold + 10f64.ln(), steps)?;
    let drop = below.ln_sequence[steps] - below.ln_sequence[0];
    Ok(plain_report(
        "hypergeometric_lemma",
        drop,
        -(steps as f64) * std::f64::consts::LN_2,
        Verdict::from_bool(below.converged && below.within_decay_bound && above.diverged),
        json!({
            "zeta": zeta,
            "ln_threshold": probe.ln_threshold,
            "below_threshold_converges": below.converged,
            "above_threshold_diverges": above.diverged,
        }),
    ))
}

fn time_scale_report(r: &Resolved) -> InequalityReport {
    let c = &r.constants;
    if !c.ln_eps1.is_finite() {
        return InequalityReport::undecided("time_scale_ordering", "ln eps1 is not finite");
    }
    let s = ScaleInputs {
        p: r.params.p,
        q: r.params.q,
        ln_eps1: c.ln_eps1,
        eps2: c.eps2,
    };
    let mut ok = 0;
    let mut total = 0;
    let mut first_failure = None;
    for k in 0..24 {
        let omega = 0.5f64.powi(k);
        for i in 0..12 {
            let radius = r.params.r0 * 0.5f64.powi(i);
            total += 1;
            let good = time_scales(omega, radius, &s)
                .map(|t| {
                    t.t1.ln <= t.t_mid.ln
                        && t.t_mid.ln <= t.t2.ln
                        && t.t2.ln <= t.t3.ln
                        && t.tilde_below_half(c.ln_eps1 + omega.ln())
                })
                .unwrap_or(false);
            if good {
                ok += 1;
            } else if first_failure.is_none() {
                first_failure = Some((omega, radius));
            }
        }
    }
    plain_report(
        "time_scale_ordering",
        ok as f64,
        total as f64,
        Verdict::from_bool(ok == total),
        json!({ "first_failure": first_failure }),
    )
}

pub fn run(r: &Resolved) -> Result<u8, CliError> {
    let mut out = Output::create(&r.out, &r.hash)?;
    let c = &r.constants;
    let e = &r.config.experiments;
    let (checks, rows) = match &e.omega_sequence {
        Some(seq) => {
            let checks = verify_omega_sequence(seq, c.theta, c.alpha)?;
            let rows = checks
                .iter()
                .map(|x| {
                    vec![
                        x.j.to_string(),
                        real(seq[x.j]),
                        "NaN".into(),
                        "NaN".into(),
                        "NaN".into(),
                        real(x.recursion_lhs),
                        real(x.recursion_rhs),
                        Verdict::from_bool(x.pass).to_string(),
                    ]
                })
                .collect::<Vec<_>>();
            (checks, rows)
        }
        None => {
            let state = build_sequences(&r.exponents, c.theta, r.params.tau, r.params.r0, e.j_max)?;
            let checks = verify_recursion(&state);
            let rows = checks
                .iter()
                .map(|x| {
                    let s = &state.entries[x.j];
                    vec![
                        x.j.to_string(),
                        s.omega.to_string(),
                        s.tilde_omega.to_string(),
                        s.radius.to_string(),
                        s.time_scale.to_string(),
                        real(x.recursion_lhs),
                        real(x.recursion_rhs),
                        Verdict::from_bool(x.pass).to_string(),
                    ]
                })
                .collect::<Vec<_>>();
            (checks, rows)
        }
    };
    out.csv("constants.csv", &HEADER, &rows)?;

    let mut reports = vec![recursion_report(&checks, e.omega_sequence.is_some())];
    reports.push(modulus_report(r)?);
    reports.push(h_report(r)?);
    reports.push(lemma_report(r)?);
    reports.push(time_scale_report(r));
    let s = &r.config.constants;
    for pred in theta_predicates(
        c.theta,
        r.params.tau,
        c.alpha,
        r.params.p,
        c.eps4,
        s.alpha_tilde,
        s.m_tilde,
    ) {
        reports.push(plain_report(
            &format!("theta_{}", pred.name),
            pred.log_value,
            0.0,
            Verdict::from_bool(pred.pass),
            serde_json::Value::Null,
        ));
    }
    let extra = json!({
        "constants": c,
        "exponents": &r.exponents,
        "steps_checked": checks.len(),
    });
    out.finish("verify-constants", r, &reports, extra)
}
