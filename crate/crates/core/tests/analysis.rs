use std::sync::Arc;

use proptest::prelude::*;
use stefan_lab::analysis::{
    caccioppoli_check, classify_alternative, density_estimates, log_lemma_check,
    oscillation_cascade, relative_change, sobolev_check, AlternativeConstants, AlternativeTag,
    LateralSetting, Verdict,
};
use stefan_lab::geometry::{FamilyKind, ShrinkFamily};
use stefan_lab::iteration::{ExponentPack, Kappa};
use stefan_lab::model::{GridDomain, ModelParams, MollifiedHeaviside};
use stefan_lab::solver::{solve_regularized, BoundaryDatum, GridFunction, SolveConfig};

fn holder_datum() -> BoundaryDatum {
    BoundaryDatum::Holder {
        offset: -0.2,
        amplitude: 1.0,
        exponent: 0.5,
        center: [0.0, 0.0],
    }
}

fn holder_params() -> ModelParams {
    let mut p = ModelParams::new(1, 3.0, 3.0).unwrap();
    p.a = 0.0;
    p.eps = 0.05;
    p
}

fn holder_run(cells: usize, dt: f64) -> GridFunction {
    let d = Arc::new(GridDomain::interval(0.0, 1.0, cells, 0.2, dt).unwrap());
    solve_regularized(
        d,
        &holder_params(),
        &holder_datum(),
        &SolveConfig::default(),
    )
    .unwrap()
    .w
}

fn finest_pair() -> [GridFunction; 2] {
    [holder_run(128, 0.001), holder_run(256, 0.0005)]
}

#[test]
fn modulus_constant_is_grid_stable() {
    let pack = ExponentPack::new(1, 3.0, 3.0, 0.5).unwrap();
    let c: Vec<f64> = finest_pair()
        .iter()
        .map(|w| {
            let r = oscillation_cascade(w, [0.0, 0.0], 0.2, &holder_params(), &pack, 10).unwrap();
            assert!(r.measurable().all(|e| e.verdict.is_pass()));
            r.modulus.fitted_constant
        })
        .collect();
    assert!(c.iter().all(|v| v.is_finite()));
    assert!(relative_change(c[0], c[1]) < 0.5, "{c:?}");
}

#[test]
fn energy_estimate_constants_are_grid_stable() {
    let family = ShrinkFamily::lateral(FamilyKind::Lateral3, [0.0, 0.0], 1.0, 0.2, 0.15).unwrap();
    let q = family.cylinder(0);
    let phi = family.cutoff(0, 1);
    let jump = MollifiedHeaviside::new(0.0, 0.05).unwrap();
    let mut cacc = Vec::new();
    let mut sob = Vec::new();
    for w in finest_pair() {
        let r = caccioppoli_check(&w, &q, -0.1, &phi, &jump, 3.0).unwrap();
        assert!(
            r.fitted_constant.is_finite() && r.fitted_constant > 0.0,
            "{r:?}"
        );
        cacc.push(r.fitted_constant);
        let r = sobolev_check(&w, &phi, &q, Kappa::Infinite, 3.0).unwrap();
        assert!(r.fitted_constant.is_finite(), "{r:?}");
        sob.push(r.fitted_constant);
    }
    assert!(relative_change(cacc[0], cacc[1]) < 0.5, "{cacc:?}");
    assert!(relative_change(sob[0], sob[1]) < 0.5, "{sob:?}");
}

fn lattice() -> Arc<GridDomain> {
    Arc::new(GridDomain::interval(0.0, 1.0, 32, 0.5, 0.0625).unwrap())
}

fn constants(p: f64) -> AlternativeConstants {
    AlternativeConstants {
        p,
        q: 3.0,
        ln_eps1: (2f64.powi(-10)).ln(),
        eps2: 2f64.powi(-10),
        eps3: 2f64.powi(-9),
    }
}

fn setting(omega: f64, tilde: f64) -> LateralSetting {
    LateralSetting {
        center: [0.0, 0.0],
        t0: 0.5,
        radius: 0.8,
        omega,
        tilde_omega: tilde,
        t1: 0.25,
        t2: 0.375,
        t3: 0.4375,
    }
}

/// Dyadic slope and node spacing keep every value exactly representable.
fn ramp(slope_num: i32, bend: i32) -> GridFunction {
    let s = slope_num as f64 / 8.0;
    let b = bend as f64 / 16.0;
    GridFunction::from_fn(lattice(), move |x, t| s * x[0] + b * x[0] * x[0] * t)
}

proptest! {
    #[test]
    fn tag_ignores_common_shifts(
        slope in 1i32..8, bend in -4i32..4, b_num in -16i32..24, shift in -16i32..16, tilde_k in 3u32..8,
    ) {
        let w = ramp(slope, bend);
        let tilde = 0.5f64.powi(tilde_k as i32);
        let (b, c) = (b_num as f64 / 16.0, shift as f64 / 4.0);
        let moved = w.map(|v| v + c);
        let s = setting(2.0, tilde);
        let k = constants(3.0);
        let t0 = classify_alternative(&w, &s, &MollifiedHeaviside::new(b, tilde / 4.0).unwrap(), &k).unwrap();
        let t1 = classify_alternative(&moved, &s, &MollifiedHeaviside::new(b + c, tilde / 4.0).unwrap(), &k).unwrap();
        prop_assert_eq!(t0.tag, t1.tag);
    }

    #[test]
    fn tag_ignores_intrinsic_rescaling(
        slope in 1i32..8, bend in -4i32..4, b_num in -16i32..24, k_lambda in 1u32..4, tilde_k in 3u32..8,
    ) {
        // at p = 2 time is not dilated, so only the values scale
        let w = ramp(slope, bend);
        let lambda = 2f64.powi(k_lambda as i32);
        let tilde = 0.5f64.powi(tilde_k as i32);
        let b = b_num as f64 / 16.0;
        let k = constants(2.0);
        let before = classify_alternative(&w, &setting(2.0, tilde), &MollifiedHeaviside::new(b, tilde / 4.0).unwrap(), &k)
            .unwrap();
        let v = w.map(|x| x / lambda);
        let jump = MollifiedHeaviside::new(b / lambda, tilde / (4.0 * lambda)).unwrap();
        let after = classify_alternative(&v, &setting(2.0 / lambda, tilde / lambda), &jump, &k).unwrap();
        if matches!(before.tag, AlternativeTag::NoJump | AlternativeTag::Alt1) {
            prop_assert_eq!(before.tag, after.tag);
        } else {
            prop_assert!(after.tag.is_alt2());
        }
    }

    #[test]
    fn density_fractions_lie_in_the_unit_interval(
        slope in 1i32..8, bend in -4i32..4, b_num in -16i32..24, tilde_k in 3u32..8,
    ) {
        let w = ramp(slope, bend);
        let tilde = 0.5f64.powi(tilde_k as i32);
        let s = setting(2.0, tilde);
        let k = constants(3.0);
        let class = classify_alternative(&w, &s, &MollifiedHeaviside::new(b_num as f64 / 16.0, tilde / 4.0).unwrap(), &k)
            .unwrap();
        for r in density_estimates(&w, &s, &class, &k, 1.0).unwrap() {
            if r.verdict != Verdict::Undecided {
                prop_assert!((0.0..=1.0).contains(&r.lhs), "{}: {}", r.name, r.lhs);
            }
        }
    }

    #[test]
    fn log_lemma_constant_stays_bounded(amp in 0.2f64..2.0, tilt in -0.5f64..0.5, rate in 1.0f64..20.0) {
        // a cold start warmed from above; oscillation at most amp + |tilt|
        let w = GridFunction::from_fn(lattice(), move |x, t| amp * (1.0 - (-rate * t).exp()) + tilt * x[0]);
        let omega = amp + tilt.abs();
        let thetas = [0.5, 0.25, 0.125, 1.0 / 16.0, 1.0 / 32.0];
        if let Ok(r) = log_lemma_check(&w, [0.5, 0.0], 0.5, 0.45, omega, &thetas) {
            prop_assert!(r.verdict != Verdict::Fail);
            prop_assert!(r.refinement_series.iter().all(|c| c.is_finite() && *c <= (32f64).ln()));
        }
    }
}
