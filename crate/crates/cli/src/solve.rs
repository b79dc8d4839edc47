//! `solve`: one regularized solve and the configured checks on it.

use std::sync::Arc;

use serde_json::{json, Value};
use stefan_lab::analysis::{
    caccioppoli_check, log_lemma_check, oscillation_cascade, sobolev_check, InequalityReport,
    Verdict,
};
use stefan_lab::convergence::energy_scan;
use stefan_lab::geometry::{FamilyKind, ShrinkFamily};
use stefan_lab::io::real;
use stefan_lab::solver::{
    max_principle_check, solve_regularized, weak_residual, BoundaryDatum, GridFunction, Solution,
};

use crate::checks::{bounds, guard, test_setup};
use crate::config::{ProbeSection, Resolved};
use crate::error::CliError;
use crate::output::{plain_report, Output};

pub const CHECKS: [&str; 9] = [
    "max_principle",
    "oscillation",
    "heat_oracle",
    "weak_residual",
    "near_jump_energy",
    "cascade",
    "caccioppoli",
    "sobolev",
    "log_lemma",
];

fn check_names(r: &Resolved) -> Result<(), CliError> {
    match r
        .config
        .experiments
        .checks
        .iter()
        .find(|c| !CHECKS.contains(&c.as_str()))
    {
        Some(c) => Err(CliError::Config(format!(
            "unknown check `{c}` in experiments.checks; known: {}",
            CHECKS.join(", ")
        ))),
        None => Ok(()),
    }
}

fn solution_rows(sol: &Solution) -> Vec<Vec<String>> {
    let d = sol.w.domain();
    let u = sol.u();
    let mut rows = Vec::new();
    for m in 0..=d.steps() {
        for i in d.closure_nodes() {
            let x = d.coords(i);
            let mut row = vec![real(d.time(m)), i.to_string(), real(x[0])];
            if d.dim() == 2 {
                row.push(real(x[1]));
            }
            row.push(real(sol.w.value(i, m)));
            row.push(real(u.value(i, m)));
            rows.push(row);
        }
    }
    rows
}

fn newton_rows(sol: &Solution) -> Vec<Vec<String>> {
    sol.log
        .iter()
        .map(|e| {
            vec![
                e.step.to_string(),
                e.iterations.to_string(),
                real(e.final_residual),
                real(e.mu_final),
            ]
        })
        .collect()
}

fn oscillation_report(r: &Resolved, sol: &Solution) -> InequalityReport {
    let u = sol.u();
    let osc = u.max() - u.min();
    let (g_lo, g_hi) = r.datum.range_on_boundary(&r.domain);
    let slack = 10.0 * r.solve.newton_tol * (1.0 + g_hi.abs().max(g_lo.abs()));
    plain_report(
        "oscillation",
        osc,
        g_hi - g_lo,
        Verdict::from_bool(osc <= g_hi - g_lo + slack),
        json!({ "min_u": u.min(), "max_u": u.max(), "slack": slack }),
    )
}

/// Compare against the datum read as the exact solution; valid for the heat mode at `p = 2`.
fn heat_report(r: &Resolved, sol: &Solution) -> InequalityReport {
    let name = "heat_oracle";
    let is_mode = matches!(r.config.datum, crate::config::DatumSection::HeatMode);
    if !is_mode || r.params.p != 2.0 || r.domain.dim() != 1 {
        return InequalityReport::undecided(name, "needs the heat-mode datum in 1D with p = 2");
    }
    let d = &r.domain;
    let u = sol.u();
    let mut err: f64 = 0.0;
    for m in 0..=d.steps() {
        for i in d.closure_nodes() {
            err = err.max((u.value(i, m) - r.datum.eval(d.coords(i), d.time(m))).abs());
        }
    }
    let bound = 5.0 * (d.h() * d.h() + d.dt());
    plain_report(
        name,
        err,
        bound,
        Verdict::from_bool(err <= bound),
        json!({ "linf_error": err }),
    )
}

/// Residuals on the configured grid and on grids coarsened by powers of two.
fn weak_report(r: &Resolved, sol: &Solution) -> Result<InequalityReport, CliError> {
    let name = "weak_residual";
    let levels = r.config.experiments.refinements.max(1);
    let coarsest = 1usize << (levels - 1);
    let setup = test_setup(r, r.domain.dt() * coarsest as f64)?;
    let residual = |w: &GridFunction| {
        weak_residual(w, &r.params, &setup.phi, setup.window, &setup.region).map(f64::abs)
    };
    let mut residuals = Vec::with_capacity(levels);
    for k in (1..levels).rev() {
        let d = Arc::new(r.config.domain(&r.base, 1 << k)?);
        let coarse = solve_regularized(d, &r.params, &r.datum, &r.solve)?;
        residuals.push(residual(&coarse.w)?);
    }
    residuals.push(residual(&sol.w)?);
    let ratios: Vec<f64> = residuals.windows(2).map(|w| w[0] / w[1]).collect();
    let finest = *residuals.last().expect("at least one level");
    let negligible = residuals.iter().all(|x| *x <= 1e-10);
    let ok = negligible || (!ratios.is_empty() && ratios.iter().all(|q| *q >= 1.5));
    let verdict = if levels == 1 && !negligible {
        Verdict::Undecided
    } else {
        Verdict::from_bool(ok)
    };
    let mut rep = plain_report(
        name,
        finest,
        residuals[0],
        verdict,
        json!({ "residuals": residuals, "ratios": ratios, "window": setup.window }),
    );
    rep.refinement_series = ratios;
    Ok(rep)
}

fn energy_report(r: &Resolved, sol: &Solution) -> Result<InequalityReport, CliError> {
    let setup = test_setup(r, r.domain.dt())?;
    let sigmas = &r.config.experiments.sigmas;
    let scan = energy_scan(&sol.w, r.params.a, sigmas, &setup.phi, r.params.p);
    Ok(match scan.slope() {
        Some(s) => plain_report(
            "near_jump_energy",
            s,
            0.8,
            Verdict::from_bool(s >= 0.8),
            json!({ "sigmas": sigmas, "energies": scan.energies }),
        ),
        None => {
            InequalityReport::undecided("near_jump_energy", "the energy vanishes at some sigma")
                .with_detail(json!({ "sigmas": sigmas, "energies": scan.energies }))
        }
    })
}

fn probe(r: &Resolved) -> ProbeSection {
    r.config.experiments.probe.clone().unwrap_or_else(|| {
        let (lo, _) = bounds(&r.domain);
        let t = r.domain.t_final();
        ProbeSection {
            center: lo,
            t0: Some(t),
            radius: 0.25,
            length: 0.5 * t,
            level: None,
        }
    })
}

fn cascade_reports(r: &Resolved, sol: &Solution) -> Result<Vec<InequalityReport>, CliError> {
    let pr = probe(r);
    let t0 = pr.t0.unwrap_or(r.domain.t_final());
    let j_max = r.config.experiments.j_max;
    match oscillation_cascade(&sol.w, pr.center, t0, &r.params, &r.exponents, j_max) {
        Ok(rep) => Ok(rep.reports()),
        Err(stefan_lab::Error::EmptyIntersection(m)) => {
            Ok(vec![InequalityReport::undecided("cascade", m)])
        }
        Err(e) => Err(e.into()),
    }
}

fn local_reports(r: &Resolved, sol: &Solution, which: &str) -> Result<InequalityReport, CliError> {
    let pr = probe(r);
    let t0 = pr.t0.unwrap_or(r.domain.t_final());
    let dim = r.domain.dim();
    match which {
        "log_lemma" => {
            let omega = sol.w.max() - sol.w.min();
            if !(omega > 0.0) {
                return Ok(InequalityReport::undecided(
                    which,
                    "the solution has no oscillation",
                ));
            }
            let thetas = &r.config.experiments.thetas;
            guard(
                which,
                log_lemma_check(&sol.w, pr.center, pr.radius, pr.length, omega, thetas),
            )
        }
        _ => {
            let family =
                ShrinkFamily::lateral(FamilyKind::Lateral3, pr.center, pr.radius, t0, pr.length)?;
            let q = family.cylinder(0);
            let phi = family.cutoff(0, dim);
            if which == "caccioppoli" {
                let k = pr.level.unwrap_or(r.params.a);
                let jump = r.params.heaviside()?;
                guard(
                    which,
                    caccioppoli_check(&sol.w, &q, k, &phi, &jump, r.params.p),
                )
            } else {
                guard(
                    which,
                    sobolev_check(&sol.w, &phi, &q, r.exponents.kappa, r.params.p),
                )
            }
        }
    }
}

fn max_principle_report(sol: &Solution, datum: &BoundaryDatum, tol: f64) -> InequalityReport {
    let mp = max_principle_check(&sol.w, datum, &sol.beta, tol);
    plain_report(
        "max_principle",
        mp.sup_u,
        mp.sup_g,
        Verdict::from_bool(mp.pass),
        json!({ "margin": mp.margin, "tolerance": mp.tolerance }),
    )
}

pub fn run(r: &Resolved) -> Result<u8, CliError> {
    check_names(r)?;
    let sol = solve_regularized(Arc::clone(&r.domain), &r.params, &r.datum, &r.solve)?;
    let mut out = Output::create(&r.out, &r.hash)?;
    let header: &[&str] = if r.domain.dim() == 2 {
        &["t", "node_index", "x", "y", "w", "u"]
    } else {
        &["t", "node_index", "x", "w", "u"]
    };
    out.csv("solution.csv", header, &solution_rows(&sol))?;
    out.csv(
        "newton_log.csv",
        &["t_step", "iters", "final_residual", "mu_final"],
        &newton_rows(&sol),
    )?;
    let mut reports = Vec::new();
    for check in &r.config.experiments.checks {
        match check.as_str() {
            "max_principle" => {
                reports.push(max_principle_report(&sol, &r.datum, r.solve.newton_tol))
            }
            "oscillation" => reports.push(oscillation_report(r, &sol)),
            "heat_oracle" => reports.push(heat_report(r, &sol)),
            "weak_residual" => reports.push(weak_report(r, &sol)?),
            "near_jump_energy" => reports.push(energy_report(r, &sol)?),
            "cascade" => reports.extend(cascade_reports(r, &sol)?),
            other => reports.push(local_reports(r, &sol, other)?),
        }
    }
    let find = |name: &str| -> Value {
        reports
            .iter()
            .find(|x| x.name == name)
            .map(|x| json!(x.lhs))
            .unwrap_or(Value::Null)
    };
    let extra = json!({
        "steps": r.domain.steps(),
        "nodes": r.domain.node_count(),
        "max_newton_iterations": sol.max_iterations(),
        "linf_error": find("heat_oracle"),
        "oscillation": find("oscillation"),
    });
    if let Some(Value::Number(e)) = extra.get("linf_error") {
        println!("L-inf error against the exact solution: {e}");
    }
    out.finish("solve", r, &reports, extra)
}
