use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{GridDomain, ModelParams};
use crate::solver::{
    max_principle_check, solve_regularized, BoundaryDatum, MaxPrincipleReport, Solution,
    SolveConfig,
};

/// One solve of a sweep with its per-run diagnostics.
#[derive(Debug, Clone)]
pub struct SweepRun {
    pub eps: f64,
    pub params: ModelParams,
    pub solution: Solution,
    pub max_principle: MaxPrincipleReport,
}

/// Solutions for a strictly decreasing list of jump widths on one grid and datum.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub runs: Vec<SweepRun>,
    /// `max |u_i - u_{i+1}|` over all grid points, for consecutive runs.
    pub distances: Vec<f64>,
}

/// Parameter sets for each width, after checking the list and the resolution gate `ε ≥ 2h·Lip β`.
pub fn sweep_jobs(
    domain: &GridDomain,
    base: &ModelParams,
    eps_list: &[f64],
) -> Result<Vec<ModelParams>> {
    if eps_list.is_empty() {
        return Err(Error::invalid("eps_list", "must not be empty"));
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::invalid("eps_list", "must be strictly decreasing"));
    }
    let min_eps = 2.0 * domain.h() * base.beta()?.lipschitz();
    if let Some(&e) = eps_list.iter().find(|&&e| e < min_eps) {
        return Err(Error::invalid(
            "eps_list",
            format!(
                "eps = {e} is below the grid-resolvable width; the smallest admissible eps is {min_eps}"
            ),
        ));
    }
    eps_list
        .iter()
        .map(|&eps| {
            let p = ModelParams {
                eps,
                ..base.clone()
            };
            p.validate()?;
            Ok(p)
        })
        .collect()
}

impl SweepResult {
    /// Collect solved runs in list order; the first failure aborts with its width.
    pub fn assemble(
        datum: &BoundaryDatum,
        config: &SolveConfig,
        jobs: Vec<ModelParams>,
        solutions: Vec<Result<Solution>>,
    ) -> Result<Self> {
        let mut runs = Vec::with_capacity(jobs.len());
        for (params, sol) in jobs.into_iter().zip(solutions) {
            let eps = params.eps;
            let solution = sol.map_err(|e| Error::SweepRun {
                eps,
                source: Box::new(e),
            })?;
            let max_principle =
                max_principle_check(&solution.w, datum, &solution.beta, config.newton_tol);
            runs.push(SweepRun {
                eps,
                params,
                solution,
                max_principle,
            });
        }
        let temps: Vec<_> = runs.iter().map(|r| r.solution.u()).collect();
        let distances = temps
            .windows(2)
            .map(|w| w[0].sup_distance(&w[1]))
            .collect::<Result<Vec<f64>>>()?;
        Ok(SweepResult { runs, distances })
    }

    pub fn eps_list(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.eps).collect()
    }

    pub fn finest(&self) -> &SweepRun {
        self.runs.last().expect("sweeps hold at least one run")
    }

    /// True when consecutive distances never grow.
    pub fn distances_non_increasing(&self) -> bool {
        self.distances.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn max_distance(&self) -> f64 {
        self.distances.iter().copied().fold(0.0, f64::max)
    }
}

/// Solve for every width in order on one grid.
pub fn run_sweep(
    domain: Arc<GridDomain>,
    base: &ModelParams,
    datum: &BoundaryDatum,
    eps_list: &[f64],
    config: &SolveConfig,
) -> Result<SweepResult> {
    let jobs = sweep_jobs(&domain, base, eps_list)?;
    let solutions = jobs
        .iter()
        .map(|p| solve_regularized(Arc::clone(&domain), p, datum, config))
        .collect();
    SweepResult::assemble(datum, config, jobs, solutions)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_names_the_minimal_width() {
        let d = GridDomain::interval(0.0, 1.0, 10, 0.1, 0.05).unwrap();
        let p = ModelParams::new(1, 2.0, 3.0).unwrap();
        let err = sweep_jobs(&d, &p, &[0.5, 0.1]).unwrap_err();
        assert!(err.to_string().contains("0.2"), "{err}");
        assert!(sweep_jobs(&d, &p, &[0.3, 0.4]).is_err());
        assert_eq!(sweep_jobs(&d, &p, &[0.5, 0.25]).unwrap().len(), 2);
    }

    #[test]
    fn single_width_has_no_distances() {
        let d = Arc::new(GridDomain::interval(0.0, 1.0, 8, 0.05, 0.025).unwrap());
        let p = ModelParams::new(1, 2.0, 3.0).unwrap();
        let s = run_sweep(
            d,
            &p,
            &BoundaryDatum::Constant(0.5),
            &[0.3],
            &SolveConfig::default(),
        )
        .unwrap();
        assert!(s.distances.is_empty());
        assert!(s.runs[0].max_principle.pass);
    }
}
