use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{GridDomain, Vec2};

/// Nodal values on every time level of a domain; exterior nodes hold `NaN`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    domain: Arc<GridDomain>,
    values: Vec<Vec<f64>>,
}

impl GridFunction {
    /// Wrap raw per-level values; exterior entries are overwritten with `NaN`.
    pub fn new(domain: Arc<GridDomain>, mut values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != domain.steps() + 1 {
            return Err(Error::invalid(
                "values",
                format!(
                    "expected {} time levels, got {}",
                    domain.steps() + 1,
                    values.len()
                ),
            ));
        }
        for (m, level) in values.iter_mut().enumerate() {
            if level.len() != domain.node_count() {
                return Err(Error::invalid(
                    "values",
                    format!("level {m} has the wrong node count"),
                ));
            }
            for (i, v) in level.iter_mut().enumerate() {
                if !domain.in_closure(i) {
                    *v = f64::NAN;
                } else if !v.is_finite() {
                    return Err(Error::invalid(
                        "values",
                        format!("non-finite value at node {i}, level {m}"),
                    ));
                }
            }
        }
        Ok(GridFunction { domain, values })
    }

    pub fn from_fn(domain: Arc<GridDomain>, f: impl Fn(Vec2, f64) -> f64) -> Self {
        let values = (0..=domain.steps())
            .map(|m| {
                let t = domain.time(m);
                (0..domain.node_count())
                    .map(|i| {
                        if domain.in_closure(i) {
                            f(domain.coords(i), t)
                        } else {
                            f64::NAN
                        }
                    })
                    .collect()
            })
            .collect();
        GridFunction { domain, values }
    }

    pub fn constant(domain: Arc<GridDomain>, c: f64) -> Self {
        GridFunction::from_fn(domain, |_, _| c)
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn domain_arc(&self) -> Arc<GridDomain> {
        Arc::clone(&self.domain)
    }

    pub fn level_count(&self) -> usize {
        self.values.len()
    }

    pub fn level(&self, m: usize) -> &[f64] {
        &self.values[m]
    }

    pub fn value(&self, node: usize, m: usize) -> f64 {
        self.values[m][node]
    }

    pub fn time(&self, m: usize) -> f64 {
        self.domain.time(m)
    }

    /// Overwrite one value; used to build constructed test fields.
    pub fn set(&mut self, node: usize, m: usize, v: f64) {
        if self.domain.in_closure(node) {
            self.values[m][node] = v;
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        let values = self
            .values
            .iter()
            .map(|l| {
                l.iter()
                    .map(|v| if v.is_nan() { *v } else { f(*v) })
                    .collect()
            })
            .collect();
        GridFunction {
            domain: Arc::clone(&self.domain),
            values,
        }
    }

    /// Largest value over `Ω̄` at every level.
    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .filter(|v| !v.is_nan())
            .fold(f64::NEG_INFINITY, |a, b| a.max(*b))
    }

    pub fn min(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .filter(|v| !v.is_nan())
            .fold(f64::INFINITY, |a, b| a.min(*b))
    }

    /// `max |self - other|` over shared nodes; the domains must agree.
    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        if *self.domain != *other.domain {
            return Err(Error::invalid(
                "grid",
                "grid functions live on different domains",
            ));
        }
        Ok(self
            .values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .filter(|(a, _)| !a.is_nan())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn into_values(self) -> Vec<Vec<f64>> {
        self.values
    }
}
