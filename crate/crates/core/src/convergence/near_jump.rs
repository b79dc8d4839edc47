use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::ModelParams;
use crate::numeric::{loglog_fit, LinearFit};
use crate::solver::{
    elements, weak_residual, weak_terms_split, GridFunction, SpaceBox, TestProfile,
};

/// `∫∫_{|w - a| ≤ 2σ} |Dw|^p φ^p` by elementwise quadrature on levels `m ≥ 1`.
///
/// An element belongs to the set when its mean value does, so the value is
/// non-decreasing in `σ`.
pub fn near_jump_energy(
    w: &GridFunction,
    a: f64,
    sigma: f64,
    phi: &dyn TestProfile,
    p: f64,
) -> f64 {
    let d = w.domain();
    let els = elements(d);
    let dt = d.dt();
    let mut total = 0.0;
    for m in 1..=d.steps() {
        let t = d.time(m);
        let vals = w.level(m);
        for el in &els {
            if (el.mean(vals) - a).abs() > 2.0 * sigma {
                continue;
            }
            let f = phi.value(el.centroid, t).max(0.0);
            if f == 0.0 {
                continue;
            }
            let g = el.gradient(vals);
            total += dt * el.size * g[0].hypot(g[1]).powf(p) * f.powf(p);
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyScan {
    pub sigmas: Vec<f64>,
    pub energies: Vec<f64>,
    /// Log-log fit `energy ~ σ^slope`; `None` when some energy vanishes.
    pub fit: Option<LinearFit>,
}

impl EnergyScan {
    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }
}

pub fn energy_scan(
    w: &GridFunction,
    a: f64,
    sigmas: &[f64],
    phi: &dyn TestProfile,
    p: f64,
) -> EnergyScan {
    let energies: Vec<f64> = sigmas
        .iter()
        .map(|&s| near_jump_energy(w, a, s, phi, p))
        .collect();
    EnergyScan {
        sigmas: sigmas.to_vec(),
        fit: loglog_fit(sigmas, &energies),
        energies,
    }
}

/// The four pieces of the weak form split at `|w - a| = σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitPassageTerms {
    pub sigma: f64,
    /// Flux pairing where `|w - a| > σ`.
    pub far_flux: f64,
    /// `-∫∫ 𝓗(w) ∂tφ`.
    pub time: f64,
    /// Flux pairing where `|w - a| ≤ σ`.
    pub near_flux: f64,
    /// `∫ 𝓗(w)φ` at the window ends, with sign.
    pub boundary: f64,
    /// The weak residual computed independently.
    pub weak_residual: f64,
}

impl LimitPassageTerms {
    pub fn sum(&self) -> f64 {
        self.far_flux + self.time + self.near_flux + self.boundary
    }
}

pub fn limit_passage_terms(
    w: &GridFunction,
    params: &ModelParams,
    sigma: f64,
    phi: &dyn TestProfile,
    window: (f64, f64),
    region: &SpaceBox,
) -> Result<LimitPassageTerms> {
    let a = params.a;
    let (terms, near) =
        weak_terms_split(w, params, phi, window, region, |v| (v - a).abs() <= sigma)?;
    Ok(LimitPassageTerms {
        sigma,
        far_flux: terms.flux - near,
        time: terms.time,
        near_flux: near,
        boundary: terms.terminal + terms.initial,
        weak_residual: weak_residual(w, params, phi, window, region)?,
    })
}

/// Size of the near-jump flux pairing across `σ`, fitted against `σ^{1/p′}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearFluxScan {
    pub sigmas: Vec<f64>,
    pub values: Vec<f64>,
    pub fit: Option<LinearFit>,
    /// Fitted exponent divided by `1/p′`.
    pub exponent_ratio: Option<f64>,
}

pub fn near_flux_scan(
    w: &GridFunction,
    params: &ModelParams,
    sigmas: &[f64],
    phi: &dyn TestProfile,
    window: (f64, f64),
    region: &SpaceBox,
) -> Result<NearFluxScan> {
    let values = sigmas
        .iter()
        .map(|&s| limit_passage_terms(w, params, s, phi, window, region).map(|t| t.near_flux.abs()))
        .collect::<Result<Vec<f64>>>()?;
    let fit = loglog_fit(sigmas, &values);
    Ok(NearFluxScan {
        sigmas: sigmas.to_vec(),
        exponent_ratio: fit.map(|f| f.slope * params.p_conj()),
        values,
        fit,
    })
}
