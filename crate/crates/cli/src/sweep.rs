//! `sweep`: one solve per jump width, run in parallel, and the vanishing-width diagnostics.

use std::sync::Arc;

use rayon::prelude::*;
use serde_json::json;
use stefan_lab::analysis::{InequalityReport, Verdict};
use stefan_lab::convergence::{
    energy_scan, equi_modulus_check, gradient_convergence_in_measure, limit_passage_terms,
    near_flux_scan, sweep_jobs, SweepResult,
};
use stefan_lab::io::real;
use stefan_lab::solver::solve_regularized;

use crate::checks::test_setup;
use crate::config::Resolved;
use crate::error::CliError;
use crate::output::{plain_report, Output};

/// Distances at or below `10·newton_tol` are solver noise and count as zero.
fn trend_report(sweep: &SweepResult, floor: f64) -> InequalityReport {
    let d = &sweep.distances;
    let cleaned: Vec<f64> = d
        .iter()
        .map(|&x| if x <= floor { 0.0 } else { x })
        .collect();
    let inactive = cleaned.iter().all(|x| *x == 0.0);
    let ok = cleaned.windows(2).all(|w| w[1] <= w[0]);
    let (first, last) = (
        d.first().copied().unwrap_or(0.0),
        d.last().copied().unwrap_or(0.0),
    );
    let verdict = if d.is_empty() {
        Verdict::Undecided
    } else {
        Verdict::from_bool(ok)
    };
    plain_report(
        "cauchy_trend",
        last,
        first,
        verdict,
        json!({ "distances": d, "noise_floor": floor, "all_below_floor": inactive }),
    )
}

fn max_principle_report(sweep: &SweepResult) -> InequalityReport {
    let worst = sweep
        .runs
        .iter()
        .map(|r| r.max_principle.margin)
        .fold(f64::INFINITY, f64::min);
    let ok = sweep.runs.iter().all(|r| r.max_principle.pass);
    plain_report(
        "max_principle",
        worst,
        0.0,
        Verdict::from_bool(ok),
        json!({ "margins": sweep.runs.iter().map(|r| r.max_principle.margin).collect::<Vec<_>>() }),
    )
}

pub fn run(r: &Resolved) -> Result<u8, CliError> {
    let e = &r.config.experiments;
    if e.eps_list.is_empty() {
        return Err(CliError::Config(
            "experiments.eps_list must list the widths to sweep".into(),
        ));
    }
    let setup = test_setup(r, r.domain.dt())?;
    let jobs = sweep_jobs(&r.domain, &r.params, &e.eps_list)?;
    let solutions: Vec<_> = jobs
        .par_iter()
        .map(|p| solve_regularized(Arc::clone(&r.domain), p, &r.datum, &r.solve))
        .collect();
    let sweep = SweepResult::assemble(&r.datum, &r.solve, jobs, solutions)?;
    let mut out = Output::create(&r.out, &r.hash)?;

    let rows: Vec<Vec<String>> = sweep
        .runs
        .iter()
        .enumerate()
        .map(|(k, run)| {
            let dist = if k == 0 {
                f64::NAN
            } else {
                sweep.distances[k - 1]
            };
            vec![
                real(run.eps),
                k.to_string(),
                real(dist),
                real(run.max_principle.margin),
            ]
        })
        .collect();
    out.csv(
        "sweep.csv",
        &[
            "eps",
            "run_id",
            "sup_distance_to_prev",
            "max_principle_margin",
        ],
        &rows,
    )?;

    let (a, p) = (r.params.a, r.params.p);
    let scans: Vec<_> = sweep
        .runs
        .par_iter()
        .map(|run| energy_scan(&run.solution.w, a, &e.sigmas, &setup.phi, p))
        .collect();
    let mut energy_rows = Vec::new();
    for (run, scan) in sweep.runs.iter().zip(&scans) {
        let slope = scan.slope().unwrap_or(f64::NAN);
        for (s, en) in scan.sigmas.iter().zip(&scan.energies) {
            energy_rows.push(vec![real(run.eps), real(*s), real(*en), real(slope)]);
        }
    }
    out.csv(
        "energy_scan.csv",
        &["eps", "sigma", "energy", "fitted_slope"],
        &energy_rows,
    )?;

    let mut reports = vec![
        trend_report(&sweep, 10.0 * r.solve.newton_tol),
        max_principle_report(&sweep),
    ];

    let equi = equi_modulus_check(&sweep, &r.datum, e.samples, e.seed)?;
    let worst_excess = equi
        .entries
        .iter()
        .filter(|x| x.verdict != Verdict::Undecided)
        .map(|x| x.max_excess)
        .fold(f64::NAN, f64::max);
    let mut rep = plain_report("equi_modulus", worst_excess, 0.0, equi.verdict, json!(equi));
    rep.fitted_constant = equi.c0;
    reports.push(rep);

    let max_eps = e.eps_list.iter().copied().fold(0.0, f64::max);
    let sigma = e.gradient_sigma.unwrap_or(1.5 * max_eps);
    let grad = gradient_convergence_in_measure(&sweep, sigma, e.rho, e.truncation)?;
    reports.push(plain_report(
        "gradient_measure",
        grad.measures.last().copied().unwrap_or(f64::NAN),
        grad.measures.first().copied().unwrap_or(f64::NAN),
        grad.verdict,
        json!(grad),
    ));

    let finest = sweep.finest();
    let scan = scans.last().expect("at least one run");
    reports.push(match scan.slope() {
        Some(s) => plain_report(
            "near_jump_energy",
            s,
            0.8,
            Verdict::from_bool(s >= 0.8),
            json!({ "eps": finest.eps, "energies": scan.energies }),
        ),
        None => {
            InequalityReport::undecided("near_jump_energy", "the energy vanishes at some sigma")
        }
    });

    let w = &finest.solution.w;
    let terms = limit_passage_terms(
        w,
        &finest.params,
        e.sigmas[0],
        &setup.phi,
        setup.window,
        &setup.region,
    )?;
    let gap = (terms.sum() - terms.weak_residual).abs();
    let scale = 1.0
        + terms.far_flux.abs()
        + terms.time.abs()
        + terms.near_flux.abs()
        + terms.boundary.abs();
    reports.push(plain_report(
        "limit_passage_split",
        gap,
        1e-10 * scale,
        Verdict::from_bool(gap <= 1e-10 * scale),
        json!(terms),
    ));
    let flux = near_flux_scan(
        w,
        &finest.params,
        &e.sigmas,
        &setup.phi,
        setup.window,
        &setup.region,
    )?;
    reports.push(match flux.exponent_ratio {
        Some(q) => plain_report(
            "near_flux",
            q,
            0.8,
            Verdict::from_bool(q >= 0.8),
            json!(flux),
        ),
        None => {
            InequalityReport::undecided("near_flux", "the near-jump flux vanishes at some sigma")
                .with_detail(json!(flux))
        }
    });

    let extra = json!({
        "eps_list": sweep.eps_list(),
        "distances": sweep.distances,
        "equi_c0": equi.c0,
    });
    out.finish("sweep", r, &reports, extra)
}
