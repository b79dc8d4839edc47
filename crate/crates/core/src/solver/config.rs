use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nonlinear-solver controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    /// Max-norm tolerance on the nodal residual, measured without regularization.
    pub newton_tol: f64,
    /// Iteration cap per regularization stage.
    pub newton_max_iter: usize,
    /// Strictly decreasing flux regularizations used before the final unregularized check.
    pub mu_schedule: Vec<f64>,
    pub linesearch_factor: f64,
    pub linesearch_max_steps: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            newton_tol: 1e-10,
            newton_max_iter: 50,
            mu_schedule: vec![1e-2, 1e-4, 1e-6, 1e-8],
            linesearch_factor: 0.5,
            linesearch_max_steps: 30,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.newton_tol > 0.0) {
            return Err(Error::invalid("solver.newton_tol", "must be positive"));
        }
        if self.newton_max_iter == 0 {
            return Err(Error::invalid("solver.newton_max_iter", "must be positive"));
        }
        if self.mu_schedule.iter().any(|m| !(*m > 0.0)) {
            return Err(Error::invalid(
                "solver.mu_schedule",
                "entries must be positive",
            ));
        }
        if self.mu_schedule.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::invalid(
                "solver.mu_schedule",
                "must be strictly decreasing",
            ));
        }
        if !(self.linesearch_factor > 0.0 && self.linesearch_factor < 1.0) {
            return Err(Error::invalid(
                "solver.linesearch_factor",
                "must lie in (0, 1)",
            ));
        }
        Ok(())
    }

    /// Tolerance used inside iterative linear solves.
    pub fn linear_tol(&self) -> f64 {
        0.01 * self.newton_tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_must_decrease() {
        let mut c = SolveConfig::default();
        assert!(c.validate().is_ok());
        c.mu_schedule = vec![1e-4, 1e-2];
        assert!(c.validate().is_err());
        c.mu_schedule = vec![];
        assert!(c.validate().is_ok());
    }
}
