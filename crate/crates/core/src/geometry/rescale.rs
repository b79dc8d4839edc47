use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::GridFunction;

/// A rescaled field with the matching jump center and width.
#[derive(Debug, Clone)]
pub struct Rescaled {
    pub w: GridFunction,
    pub lambda: f64,
    pub jump: RescaledJump,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaledJump {
    pub a: f64,
    pub eps: f64,
}

/// `v̂(y, τ) = w(y, t0 + λ^{2-p}(τ - t0))/λ` on the same grid.
///
/// Source times between levels are interpolated linearly. For `p ≥ 2` and
/// `λ ≥ 1` every source time stays inside `[0, T]`.
pub fn rescale_solution(
    w: &GridFunction,
    lambda: f64,
    t0: f64,
    p: f64,
    a: f64,
    eps: f64,
) -> Result<Rescaled> {
    if !(lambda >= 1.0) {
        return Err(Error::invalid(
            "lambda",
            format!("must be at least 1, got {lambda}"),
        ));
    }
    let d = w.domain();
    if !(0.0..=d.t_final()).contains(&t0) {
        return Err(Error::invalid("t0", "must lie in [0, T]"));
    }
    let dilation = lambda.powf(2.0 - p);
    let levels = (0..=d.steps())
        .map(|m| {
            let src: Vec<f64> = if dilation == 1.0 {
                w.level(m).to_vec()
            } else {
                let t = (t0 + dilation * (d.time(m) - t0)).clamp(0.0, d.t_final());
                let s = t / d.dt();
                let k = (s.floor() as usize).min(d.steps());
                let frac = s - k as f64;
                if k == d.steps() || frac == 0.0 {
                    w.level(k).to_vec()
                } else {
                    w.level(k)
                        .iter()
                        .zip(w.level(k + 1))
                        .map(|(a, b)| (1.0 - frac) * a + frac * b)
                        .collect()
                }
            };
            src.into_iter()
                .enumerate()
                .map(|(i, v)| if d.in_closure(i) { v / lambda } else { 0.0 })
                .collect()
        })
        .collect();
    Ok(Rescaled {
        w: GridFunction::new(w.domain_arc(), levels)?,
        lambda,
        jump: RescaledJump {
            a: a / lambda,
            eps: eps / lambda,
        },
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::GridDomain;

    #[test]
    fn unit_factor_is_identity() {
        let d = Arc::new(GridDomain::interval(0.0, 1.0, 8, 1.0, 0.125).unwrap());
        let w = GridFunction::from_fn(d, |x, t| x[0] * x[0] + t);
        let r = rescale_solution(&w, 1.0, 0.5, 3.0, 0.2, 0.05).unwrap();
        assert_eq!(r.w, w);
        assert_eq!(r.jump, RescaledJump { a: 0.2, eps: 0.05 });
    }

    #[test]
    fn linear_in_time_halves_with_dilation() {
        let d = Arc::new(GridDomain::interval(0.0, 1.0, 8, 1.0, 0.0625).unwrap());
        let w = GridFunction::from_fn(Arc::clone(&d), |x, t| x[0] + 3.0 * t);
        let p = 3.0;
        let t0 = 0.5;
        let r = rescale_solution(&w, 2.0, t0, p, 0.0, 0.1).unwrap();
        for m in 0..=d.steps() {
            let tau = d.time(m);
            let src = t0 + 2f64.powf(2.0 - p) * (tau - t0);
            for i in 0..d.node_count() {
                let expect = (d.coords(i)[0] + 3.0 * src) / 2.0;
                assert!((r.w.value(i, m) - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn quadratic_growth_only_divides() {
        let d = Arc::new(GridDomain::interval(0.0, 1.0, 8, 1.0, 0.25).unwrap());
        let w = GridFunction::from_fn(Arc::clone(&d), |x, t| x[0].sin() + t);
        let r = rescale_solution(&w, 4.0, 0.3, 2.0, 1.0, 0.2).unwrap();
        for m in 0..=d.steps() {
            for i in 0..d.node_count() {
                assert_eq!(r.w.value(i, m), w.value(i, m) / 4.0);
            }
        }
        assert!(rescale_solution(&w, 0.5, 0.3, 2.0, 1.0, 0.2).is_err());
    }
}
