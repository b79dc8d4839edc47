use std::sync::Arc;

use proptest::prelude::*;
use stefan_lab::geometry::{oscillation, rescale_solution, Cylinder};
use stefan_lab::model::GridDomain;
use stefan_lab::solver::GridFunction;

fn domain() -> Arc<GridDomain> {
    Arc::new(GridDomain::interval(0.0, 1.0, 32, 0.5, 1.0 / 64.0).unwrap())
}

fn field(a: f64, b: f64, c: f64) -> GridFunction {
    GridFunction::from_fn(domain(), move |x, t| a * (b * x[0]).sin() + c * t * x[0])
}

proptest! {
    #[test]
    fn oscillation_grows_with_the_cylinder(
        a in -2.0f64..2.0, b in 0.5f64..6.0, c in -2.0f64..2.0,
        x0 in 0.0f64..1.0, r in 0.05f64..0.5, dr in 0.0f64..0.5, t0 in 0.1f64..0.5,
    ) {
        let w = field(a, b, c);
        let small = Cylinder::window([x0, 0.0], r, t0 - 0.1, t0).unwrap();
        let big = Cylinder::window([x0, 0.0], r + dr, t0 - 0.2, t0).unwrap();
        prop_assert!(big.includes(&small, 1));
        prop_assert!(oscillation(&w, &small).unwrap() <= oscillation(&w, &big).unwrap());
    }

    #[test]
    fn oscillation_ignores_constants(a in -2.0f64..2.0, b in 0.5f64..6.0, shift in -8i32..8, r in 0.05f64..0.5) {
        // dyadic shifts keep the subtraction exact
        let w = field(a, b, 0.0);
        let s = shift as f64 / 4.0;
        let moved = w.map(|v| v + s);
        let q = Cylinder::window([0.5, 0.0], r, 0.0, 0.5).unwrap();
        let (o1, o2) = (oscillation(&w, &q).unwrap(), oscillation(&moved, &q).unwrap());
        prop_assert!((o1 - o2).abs() <= 1e-14 * (1.0 + o1), "{} vs {}", o1, o2);
    }

    #[test]
    fn rescaling_divides_oscillation(a in -2.0f64..2.0, b in 0.5f64..6.0, c in -2.0f64..2.0, k in 0u32..4) {
        let lambda = 2f64.powi(k as i32);
        let q = Cylinder::window([0.5, 0.0], 0.3, 0.0, 0.5).unwrap();
        // no time dilation at p = 2, so the division is exact for every field
        let w = field(a, b, c);
        let v = rescale_solution(&w, lambda, 0.25, 2.0, 0.0, 0.1).unwrap();
        prop_assert_eq!(oscillation(&v.w, &q).unwrap(), oscillation(&w, &q).unwrap() / lambda);
        // at p = 3 time is dilated; a time-independent field only picks up
        // rounding from blending two equal levels
        let w = field(a, b, 0.0);
        let v = rescale_solution(&w, lambda, 0.25, 3.0, 0.0, 0.1).unwrap();
        let want = oscillation(&w, &q).unwrap() / lambda;
        prop_assert!((oscillation(&v.w, &q).unwrap() - want).abs() <= 8.0 * f64::EPSILON * (1.0 + want));
        prop_assert_eq!(v.jump.eps, 0.1 / lambda);
    }
}

#[test]
fn dilated_rescaling_stays_within_interpolation_error() {
    let w = field(0.0, 1.0, 1.0);
    let q = Cylinder::window([0.5, 0.0], 0.5, 0.0, 0.5).unwrap();
    let v = rescale_solution(&w, 4.0, 0.5, 3.0, 0.0, 0.1).unwrap();
    // source times span [0.5 - 0.5/4, 0.5]: osc of t·x there is 0.5 - 0
    let expected = 0.5 / 4.0;
    let dt = w.domain().dt();
    assert!((oscillation(&v.w, &q).unwrap() - expected).abs() <= dt);
}
