use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{BoundaryDatum, GridFunction, SolveConfig};
use crate::error::{Error, Result};
use crate::linalg::{max_norm, pcg, solve_tridiagonal, CsrMatrix};
use crate::model::{BetaMap, EnthalpyMap, GridDomain, ModelParams, SpatialKind, Vec2, VectorField};

/// A P1 element: a segment in 1D, a right triangle in 2D.
#[derive(Debug, Clone)]
pub(crate) struct Element {
    pub nodes: Vec<usize>,
    pub grads: Vec<Vec2>,
    pub size: f64,
    pub centroid: Vec2,
}

/// Elements covering `Ω`; every cell in 2D splits along its lower-left to upper-right diagonal.
pub(crate) fn elements(domain: &GridDomain) -> Vec<Element> {
    let h = domain.h();
    let mut out = Vec::new();
    for c in 0..domain.cell_count() {
        if !domain.cell_in_domain(c) {
            continue;
        }
        let nodes = domain.cell_nodes(c);
        if domain.dim() == 1 {
            out.push(Element {
                nodes,
                grads: vec![[-1.0 / h, 0.0], [1.0 / h, 0.0]],
                size: h,
                centroid: domain.cell_center(c),
            });
        } else {
            let (ll, lr, ur, ul) = (nodes[0], nodes[1], nodes[2], nodes[3]);
            let x0 = domain.coords(ll);
            out.push(Element {
                nodes: vec![ll, lr, ur],
                grads: vec![[-1.0 / h, 0.0], [1.0 / h, -1.0 / h], [0.0, 1.0 / h]],
                size: 0.5 * h * h,
                centroid: [x0[0] + 2.0 * h / 3.0, x0[1] + h / 3.0],
            });
            out.push(Element {
                nodes: vec![ll, ur, ul],
                grads: vec![[0.0, -1.0 / h], [1.0 / h, 0.0], [-1.0 / h, 1.0 / h]],
                size: 0.5 * h * h,
                centroid: [x0[0] + h / 3.0, x0[1] + 2.0 * h / 3.0],
            });
        }
    }
    out
}

impl Element {
    pub fn gradient(&self, w: &[f64]) -> Vec2 {
        let mut g = [0.0; 2];
        for (a, &n) in self.nodes.iter().enumerate() {
            g[0] += w[n] * self.grads[a][0];
            g[1] += w[n] * self.grads[a][1];
        }
        g
    }

    pub fn mean(&self, w: &[f64]) -> f64 {
        self.nodes.iter().map(|&n| w[n]).sum::<f64>() / self.nodes.len() as f64
    }
}

/// One row of the per-step convergence log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonLogEntry {
    pub step: usize,
    pub time: f64,
    pub iterations: usize,
    /// Max-norm residual without regularization.
    pub final_residual: f64,
    /// Regularization of the last stage that performed Newton iterations.
    pub mu_final: f64,
}

/// Output of [`solve_regularized`].
#[derive(Debug, Clone)]
pub struct Solution {
    pub w: GridFunction,
    pub log: Vec<NewtonLogEntry>,
    pub beta: BetaMap,
}

impl Solution {
    /// Temperatures `u = β⁻¹(w)`.
    pub fn u(&self) -> GridFunction {
        let beta = self.beta;
        self.w.map(|w| beta.inverse(w))
    }

    pub fn max_iterations(&self) -> usize {
        self.log.iter().map(|e| e.iterations).max().unwrap_or(0)
    }
}

struct Scheme<'a> {
    domain: &'a GridDomain,
    elements: Vec<Element>,
    unknown: Vec<Option<usize>>,
    unknown_nodes: Vec<usize>,
    mass: Vec<f64>,
    enthalpy: EnthalpyMap,
    field: VectorField,
    beta: BetaMap,
    tridiagonal: bool,
}

impl<'a> Scheme<'a> {
    fn new(domain: &'a GridDomain, params: &ModelParams) -> Result<Self> {
        let mut unknown = vec![None; domain.node_count()];
        let mut unknown_nodes = Vec::new();
        for (i, slot) in unknown.iter_mut().enumerate() {
            if domain.spatial_kind(i) == SpatialKind::Interior {
                *slot = Some(unknown_nodes.len());
                unknown_nodes.push(i);
            }
        }
        if unknown_nodes.is_empty() {
            return Err(Error::invalid("grid", "domain has no interior nodes"));
        }
        let mass = unknown_nodes.iter().map(|&i| domain.measure(i)).collect();
        Ok(Scheme {
            domain,
            elements: elements(domain),
            unknown,
            unknown_nodes,
            mass,
            enthalpy: params.enthalpy()?,
            field: params.field()?,
            beta: params.beta()?,
            tridiagonal: domain.dim() == 1 && !domain.is_periodic(),
        })
    }

    /// Mass-weighted residual `M(𝓗(w) - e_old) + Δt·Σ|K|⟨Ā, ∇φ⟩`.
    fn residual(&self, w: &[f64], e_old: &[f64], t: f64, mu: f64) -> Vec<f64> {
        let dt = self.domain.dt();
        let mut f: Vec<f64> = self
            .unknown_nodes
            .iter()
            .enumerate()
            .map(|(k, &i)| self.mass[k] * (self.enthalpy.eval(w[i]) - e_old[k]))
            .collect();
        for el in &self.elements {
            let g = el.gradient(w);
            let flux = self
                .field
                .transformed(&self.beta, el.centroid, t, el.mean(w), g, mu);
            for (a, &n) in el.nodes.iter().enumerate() {
                if let Some(k) = self.unknown[n] {
                    f[k] += dt * el.size * (flux[0] * el.grads[a][0] + flux[1] * el.grads[a][1]);
                }
            }
        }
        f
    }

    fn scaled_norm(&self, f: &[f64]) -> f64 {
        f.iter()
            .zip(&self.mass)
            .fold(0.0, |m, (r, mm)| m.max((r / mm).abs()))
    }

    /// Newton direction for residual `f`.
    fn direction(
        &self,
        w: &[f64],
        f: &[f64],
        t: f64,
        mu: f64,
        linear_tol: f64,
    ) -> Result<Vec<f64>> {
        let dt = self.domain.dt();
        let n = self.unknown_nodes.len();
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let diag_mass: Vec<f64> = self
            .unknown_nodes
            .iter()
            .enumerate()
            .map(|(k, &i)| self.mass[k] * self.enthalpy.deriv(w[i]))
            .collect();
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(n * 7);
        for el in &self.elements {
            let g = el.gradient(w);
            let (dxi, dw) =
                self.field
                    .transformed_jacobian(&self.beta, el.centroid, t, el.mean(w), g, mu);
            let nv = el.nodes.len() as f64;
            for (a, &na) in el.nodes.iter().enumerate() {
                let Some(ka) = self.unknown[na] else { continue };
                let ga = el.grads[a];
                for (b, &nb) in el.nodes.iter().enumerate() {
                    let Some(kb) = self.unknown[nb] else { continue };
                    let gb = el.grads[b];
                    let dgb = [
                        dxi[0][0] * gb[0] + dxi[0][1] * gb[1],
                        dxi[1][0] * gb[0] + dxi[1][1] * gb[1],
                    ];
                    let mut v = ga[0] * dgb[0] + ga[1] * dgb[1];
                    if self.tridiagonal {
                        v += (ga[0] * dw[0] + ga[1] * dw[1]) / nv;
                    }
                    entries.push((ka, kb, dt * el.size * v));
                }
            }
        }
        if self.tridiagonal {
            let mut lower = vec![0.0; n];
            let mut upper = vec![0.0; n];
            let mut diag = diag_mass;
            for (r, c, v) in entries {
                if r == c {
                    diag[r] += v;
                } else if c + 1 == r {
                    lower[r] += v;
                } else if r + 1 == c {
                    upper[r] += v;
                } else {
                    return Err(Error::LinearSolve(
                        "non-tridiagonal entry in 1D assembly".into(),
                    ));
                }
            }
            solve_tridiagonal(&lower, &diag, &upper, &rhs)
        } else {
            for (k, d) in diag_mass.into_iter().enumerate() {
                entries.push((k, k, d));
            }
            let a = CsrMatrix::from_triplets(n, entries);
            let min_mass = self.mass.iter().cloned().fold(f64::INFINITY, f64::min);
            pcg(&a, &rhs, linear_tol * min_mass, 20 * n + 200)
        }
    }
}

/// Solve the backward-Euler scheme for every time step of the domain.
///
/// Dirichlet nodes carry `β(g)` exactly; each step runs Newton through the
/// regularization schedule and accepts once the unregularized residual is
/// below `newton_tol`.
pub fn solve_regularized(
    domain: Arc<GridDomain>,
    params: &ModelParams,
    datum: &BoundaryDatum,
    config: &SolveConfig,
) -> Result<Solution> {
    params.validate()?;
    config.validate()?;
    let scheme = Scheme::new(&domain, params)?;
    let beta = scheme.beta;
    let (g_lo, g_hi) = datum.range_on_boundary(&domain);
    let lip = beta.lipschitz();
    let (w_lo, w_hi) = (beta.eval(g_lo) - lip, beta.eval(g_hi) + lip);
    let nodes = domain.node_count();
    let mut levels: Vec<Vec<f64>> = Vec::with_capacity(domain.steps() + 1);
    let first: Vec<f64> = (0..nodes)
        .map(|i| {
            if domain.in_closure(i) {
                beta.eval(datum.eval(domain.coords(i), 0.0))
            } else {
                f64::NAN
            }
        })
        .collect();
    levels.push(first);
    let mut log = Vec::with_capacity(domain.steps());
    for m in 0..domain.steps() {
        let t = domain.time(m + 1);
        let prev = &levels[m];
        let e_old: Vec<f64> = scheme
            .unknown_nodes
            .iter()
            .map(|&i| scheme.enthalpy.eval(prev[i]))
            .collect();
        let mut w = prev.clone();
        for (i, wi) in w.iter_mut().enumerate() {
            if domain.in_closure(i) && scheme.unknown[i].is_none() {
                *wi = beta.eval(datum.eval(domain.coords(i), t));
            }
        }
        let mut iterations = 0;
        let mut mu_final = 0.0;
        let mut f0 = scheme.residual(&w, &e_old, t, 0.0);
        let mut res0 = scheme.scaled_norm(&f0);
        if res0 > config.newton_tol {
            let stages: Vec<f64> = config
                .mu_schedule
                .iter()
                .copied()
                .chain(std::iter::once(0.0))
                .collect();
            for (s, &mu) in stages.iter().enumerate() {
                let last = s + 1 == stages.len();
                if last && res0 <= config.newton_tol {
                    break;
                }
                let outcome = newton_stage(&scheme, &mut w, &e_old, t, mu, config, (w_lo, w_hi));
                match outcome {
                    Ok(k) => {
                        if k > 0 {
                            mu_final = mu;
                        }
                        iterations += k;
                    }
                    Err(e) if !last => {
                        // a regularized stage may stall; the unregularized stage decides
                        let _ = e;
                    }
                    Err(e) => return Err(e),
                }
                f0 = scheme.residual(&w, &e_old, t, 0.0);
                res0 = scheme.scaled_norm(&f0);
            }
        }
        if !(res0 <= config.newton_tol) {
            return Err(Error::NewtonDiverged {
                step: m + 1,
                time: t,
                residual: res0,
            });
        }
        log.push(NewtonLogEntry {
            step: m + 1,
            time: t,
            iterations,
            final_residual: res0,
            mu_final,
        });
        levels.push(w);
    }
    let w = GridFunction::new(Arc::clone(&domain), levels)?;
    Ok(Solution { w, log, beta })
}

/// Newton iterations at fixed regularization; returns the iteration count.
fn newton_stage(
    scheme: &Scheme,
    w: &mut [f64],
    e_old: &[f64],
    t: f64,
    mu: f64,
    config: &SolveConfig,
    bounds: (f64, f64),
) -> Result<usize> {
    let mut f = scheme.residual(w, e_old, t, mu);
    let mut norm = scheme.scaled_norm(&f);
    for it in 0..config.newton_max_iter {
        if norm <= config.newton_tol {
            return Ok(it);
        }
        let delta = scheme.direction(w, &f, t, mu, config.linear_tol())?;
        let mut lambda = 1.0;
        let mut accepted = false;
        let mut trial = w.to_vec();
        for _ in 0..=config.linesearch_max_steps {
            for (k, &i) in scheme.unknown_nodes.iter().enumerate() {
                trial[i] = w[i] + lambda * delta[k];
            }
            let inside = scheme
                .unknown_nodes
                .iter()
                .all(|&i| trial[i] >= bounds.0 && trial[i] <= bounds.1);
            if inside {
                let ft = scheme.residual(&trial, e_old, t, mu);
                let nt = scheme.scaled_norm(&ft);
                if nt < (1.0 - 1e-4 * lambda) * norm {
                    w.copy_from_slice(&trial);
                    f = ft;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            lambda *= config.linesearch_factor;
        }
        if !accepted {
            return Err(Error::NewtonDiverged {
                step: 0,
                time: t,
                residual: norm,
            });
        }
        if max_norm(&delta) * lambda < 1e-15 && norm > config.newton_tol {
            break;
        }
    }
    if norm <= config.newton_tol {
        Ok(config.newton_max_iter)
    } else {
        Err(Error::NewtonDiverged {
            step: 0,
            time: t,
            residual: norm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: f64, a: f64, eps: f64) -> ModelParams {
        let mut m = ModelParams::new(1, p, 3.0).unwrap();
        m.a = a;
        m.eps = eps;
        m
    }

    #[test]
    fn constant_datum_is_steady() {
        let d = Arc::new(GridDomain::interval(0.0, 1.0, 16, 0.1, 0.01).unwrap());
        let sol = solve_regularized(
            d,
            &params(3.0, 0.0, 0.05),
            &BoundaryDatum::Constant(0.4),
            &SolveConfig::default(),
        )
        .unwrap();
        for m in 0..sol.w.level_count() {
            assert!(sol.w.level(m).iter().all(|v| *v == 0.4));
        }
        assert_eq!(sol.max_iterations(), 0);
    }

    #[test]
    fn heat_mode_is_tracked() {
        let d = Arc::new(GridDomain::interval(0.0, 1.0, 32, 0.1, 0.001).unwrap());
        let sol = solve_regularized(
            Arc::clone(&d),
            &params(2.0, 10.0, 0.05),
            &BoundaryDatum::heat_mode(),
            &SolveConfig::default(),
        )
        .unwrap();
        let pi = std::f64::consts::PI;
        let mut err: f64 = 0.0;
        for m in 0..sol.w.level_count() {
            let t = d.time(m);
            for i in 0..d.node_count() {
                let x = d.coords(i)[0];
                err = err.max((sol.w.value(i, m) - (-pi * pi * t).exp() * (pi * x).sin()).abs());
            }
        }
        let h = d.h();
        assert!(err <= 5.0 * (h * h + d.dt()), "{err}");
    }

    #[test]
    fn antisymmetric_datum_gives_antisymmetric_solution() {
        let d = Arc::new(GridDomain::interval(0.0, 1.0, 40, 0.05, 0.005).unwrap());
        let g = BoundaryDatum::Affine {
            offset: -0.5,
            slope: [1.0, 0.0],
        };
        let cfg = SolveConfig::default();
        let sol = solve_regularized(Arc::clone(&d), &params(3.0, 0.0, 0.05), &g, &cfg).unwrap();
        let n = d.node_count();
        for m in 0..sol.w.level_count() {
            for i in 0..n {
                let s = sol.w.value(i, m) + sol.w.value(n - 1 - i, m);
                assert!(s.abs() < 10.0 * cfg.newton_tol, "level {m} node {i}: {s}");
            }
        }
    }

    #[test]
    fn two_dimensional_constant_and_heat_like_runs() {
        let d = Arc::new(GridDomain::square(0.0, 1.0, 8, 0.02, 0.005).unwrap());
        let sol = solve_regularized(
            Arc::clone(&d),
            &{
                let mut m = ModelParams::new(2, 3.0, 3.0).unwrap();
                m.eps = 0.1;
                m
            },
            &BoundaryDatum::Affine {
                offset: -0.3,
                slope: [0.4, 0.2],
            },
            &SolveConfig::default(),
        )
        .unwrap();
        assert!(sol.log.iter().all(|e| e.final_residual <= 1e-10));
    }
}
