//! Grid quadrature over cylinder intersections.

use crate::model::GridDomain;

/// Fewest grid points a checker accepts before abstaining.
pub const MIN_POINTS: usize = 8;

/// Measure-weighted mean of `f(node)` over `nodes`; `None` when the set has no mass.
pub(crate) fn space_mean(
    domain: &GridDomain,
    nodes: &[usize],
    f: impl Fn(usize) -> f64,
) -> Option<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for &i in nodes {
        let m = domain.measure(i);
        num += m * f(i);
        den += m;
    }
    (den > 0.0).then(|| num / den)
}

/// Mean over space-time points; every level carries the same time weight.
pub(crate) fn space_time_mean(
    domain: &GridDomain,
    points: &[(usize, usize)],
    f: impl Fn(usize, usize) -> f64,
) -> Option<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for &(i, m) in points {
        let w = domain.measure(i);
        num += w * f(i, m);
        den += w;
    }
    (den > 0.0).then(|| num / den)
}

/// Fraction of the measure of `points` where `pred` holds.
pub(crate) fn fraction(
    domain: &GridDomain,
    points: &[(usize, usize)],
    pred: impl Fn(usize, usize) -> bool,
) -> Option<f64> {
    space_time_mean(domain, points, |i, m| if pred(i, m) { 1.0 } else { 0.0 })
}
