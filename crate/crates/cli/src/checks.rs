//! Pieces shared by the solve and sweep commands.

use stefan_lab::analysis::InequalityReport;
use stefan_lab::model::{GridDomain, Vec2};
use stefan_lab::solver::{SpaceBox, TensorBump, TestProfile};
use stefan_lab::Error;

use crate::config::Resolved;
use crate::error::CliError;

/// Bounding box of the closed domain.
pub fn bounds(d: &GridDomain) -> (Vec2, Vec2) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for i in d.closure_nodes() {
        let x = d.coords(i);
        for k in 0..2 {
            lo[k] = lo[k].min(x[k]);
            hi[k] = hi[k].max(x[k]);
        }
    }
    (lo, hi)
}

/// Round `t` to a multiple of `dt`.
fn snap(t: f64, dt: f64) -> f64 {
    (t / dt).round() * dt
}

/// The weak-form test function, its region and its time window.
pub struct TestSetup {
    pub phi: TensorBump,
    pub region: SpaceBox,
    pub window: (f64, f64),
}

/// The configured test function, or a bump on the middle 60% of the bounding
/// box over `(T/5, 4T/5)`. The window is snapped to multiples of `dt`.
pub fn test_setup(r: &Resolved, dt: f64) -> Result<TestSetup, CliError> {
    let d = &r.domain;
    let dim = d.dim();
    let (center, radius, window) = match &r.config.experiments.test_function {
        Some(t) => (t.center, t.radius, (t.window[0], t.window[1])),
        None => {
            let (lo, hi) = bounds(d);
            let mut c = [0.0; 2];
            let mut rad = [1.0; 2];
            for k in 0..dim {
                c[k] = 0.5 * (lo[k] + hi[k]);
                rad[k] = 0.3 * (hi[k] - lo[k]);
            }
            let t = d.t_final();
            (c, rad, (0.2 * t, 0.8 * t))
        }
    };
    let window = (snap(window.0, dt), snap(window.1, dt));
    if !(window.0 < window.1) {
        return Err(CliError::Config(format!(
            "test-function window collapses to {window:?} on time step {dt}"
        )));
    }
    let phi = TensorBump::new(center, radius, dim)?;
    Ok(TestSetup {
        region: phi.support(),
        phi,
        window,
    })
}

/// Turn a grid that cannot support a check into an `UNDECIDED` row.
pub fn guard(
    name: &str,
    result: stefan_lab::Result<InequalityReport>,
) -> Result<InequalityReport, CliError> {
    match result {
        Ok(r) => Ok(r),
        Err(Error::EmptyIntersection(m)) => Ok(InequalityReport::undecided(name, m)),
        Err(e) => Err(e.into()),
    }
}
