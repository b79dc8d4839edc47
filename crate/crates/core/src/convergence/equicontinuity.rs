use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SweepResult;
use crate::analysis::Verdict;
use crate::error::{Error, Result};
use crate::iteration::{h_of_eps, Anchor, Modulus};
use crate::solver::{BoundaryDatum, GridFunction};

/// Rounding slack added to the bound.
const FIT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquiModulusEntry {
    pub eps: f64,
    /// `None` when `ε` is too large for `h(ε)` to exist in its bracket.
    pub h: Option<f64>,
    /// Largest sampled `|u(z) - u(z′)|`.
    pub max_difference: f64,
    /// Largest `|u(z) - u(z′)| - ω̄(|z - z′|) - h(ε)`; nonpositive when the bound holds.
    pub max_excess: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquiModulusReport {
    /// Fitted on the coarsest width with a defined `h(ε)`, then frozen.
    pub c0: f64,
    pub fitted_on: Option<f64>,
    pub samples: usize,
    pub entries: Vec<EquiModulusEntry>,
    pub verdict: Verdict,
}

/// Parabolic distance `max(|x - x′|, |t - t′|^{1/p})`.
fn parabolic_distance(a: [f64; 2], s: f64, b: [f64; 2], t: f64, p: f64) -> f64 {
    let dx = (a[0] - b[0]).hypot(a[1] - b[1]);
    dx.max((s - t).abs().powf(1.0 / p))
}

/// The ε-uniform modulus `ω̄(r) = 4c₀(ω₁(√r) + ω_g(√r))` plus `h(ε)` on sampled point pairs.
///
/// `ω₁` is the iterated-log modulus with unit base radius. The datum
/// modulus counts as zero when none is known. `c₀ ≥ 1` is the smallest
/// value that makes the coarsest run with a defined `h(ε)` satisfy the
/// bound on its samples; runs without `h(ε)` are `UNDECIDED`.
pub fn equi_modulus_check(
    sweep: &SweepResult,
    datum: &BoundaryDatum,
    samples: usize,
    seed: u64,
) -> Result<EquiModulusReport> {
    let first = &sweep.runs[0].params;
    let alpha = first.alpha();
    let omega1 = Modulus::new(
        1.0,
        first.theta,
        alpha,
        Anchor::canonical(first.theta, alpha)?,
    )?;
    let d = sweep.runs[0].solution.w.domain_arc();
    let p = first.p;
    let nodes: Vec<usize> = d.closure_nodes().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let a = (
            nodes[rng.gen_range(0..nodes.len())],
            rng.gen_range(0..=d.steps()),
        );
        let b = (
            nodes[rng.gen_range(0..nodes.len())],
            rng.gen_range(0..=d.steps()),
        );
        pairs.push((a, b));
    }
    let shape = |r: f64| -> Result<f64> {
        if r == 0.0 {
            return Ok(0.0);
        }
        let s = r.sqrt();
        Ok(4.0 * (omega1.eval(s)? + datum.modulus(s).unwrap_or(0.0)))
    };
    let mut shapes = Vec::with_capacity(pairs.len());
    for &((i, m), (k, n)) in &pairs {
        shapes.push(shape(parabolic_distance(
            d.coords(i),
            d.time(m),
            d.coords(k),
            d.time(n),
            p,
        ))?);
    }
    let diffs = |u: &GridFunction| -> Vec<f64> {
        pairs
            .iter()
            .map(|&((i, m), (k, n))| (u.value(i, m) - u.value(k, n)).abs())
            .collect()
    };
    let hs: Vec<Option<f64>> = sweep
        .runs
        .iter()
        .map(|r| match h_of_eps(r.eps, r.params.tau, alpha) {
            Ok(h) => Ok(Some(h.h)),
            Err(Error::NoRoot(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let anchor = hs.iter().position(Option::is_some);
    let c0 = match anchor {
        None => f64::NAN,
        Some(k) => {
            let h0 = hs[k].unwrap_or(0.0);
            diffs(&sweep.runs[k].solution.u())
                .iter()
                .zip(&shapes)
                .filter(|(_, s)| **s > 0.0)
                .map(|(dv, s)| (dv - h0).max(0.0) / s)
                .fold(1.0, f64::max)
        }
    };
    let mut entries = Vec::with_capacity(sweep.runs.len());
    for (run, &h) in sweep.runs.iter().zip(&hs) {
        let dv = diffs(&run.solution.u());
        let max_difference = dv.iter().copied().fold(0.0, f64::max);
        let (max_excess, verdict) = match h {
            None => (f64::NAN, Verdict::Undecided),
            Some(h) => {
                let x = dv
                    .iter()
                    .zip(&shapes)
                    .map(|(v, s)| v - c0 * s - h)
                    .fold(f64::NEG_INFINITY, f64::max);
                (x, Verdict::from_bool(x <= FIT_SLACK))
            }
        };
        entries.push(EquiModulusEntry {
            eps: run.eps,
            h,
            max_difference,
            max_excess,
            verdict,
        });
    }
    let verdict = if anchor.is_none() {
        Verdict::Undecided
    } else {
        Verdict::from_bool(entries.iter().all(|e| e.verdict != Verdict::Fail))
    };
    Ok(EquiModulusReport {
        c0,
        fitted_on: anchor.map(|k| sweep.runs[k].eps),
        samples,
        entries,
        verdict,
    })
}
