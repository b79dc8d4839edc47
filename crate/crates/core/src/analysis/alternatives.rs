use serde::{Deserialize, Serialize};
use serde_json::json;

use super::measure::{fraction, space_mean, MIN_POINTS};
use super::report::{InequalityReport, NamedTerm, Verdict};
use crate::error::{Error, Result};
use crate::geometry::{oscillation, time_scales, Cylinder, ScaleInputs};
use crate::model::{ModelParams, MollifiedHeaviside, NodeKind, Vec2};
use crate::solver::GridFunction;

/// Which case of the lateral dichotomy a solution falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AlternativeTag {
    /// The jump level lies outside `[μ⁻, μ⁺]`.
    NoJump,
    /// `b ≤ μ⁺ - 2ω̃`: the jump sits well below the supremum.
    Alt1,
    /// `b > μ⁺ - 2ω̃` with high energy near the jump.
    #[serde(rename = "ALT2_1")]
    Alt2_1,
    /// `b > μ⁺ - 2ω̃` with low energy near the jump.
    #[serde(rename = "ALT2_2")]
    Alt2_2,
}

impl AlternativeTag {
    pub fn is_alt2(self) -> bool {
        matches!(self, AlternativeTag::Alt2_1 | AlternativeTag::Alt2_2)
    }
}

/// Smallness constants of the lateral argument, `ε₁` in log form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlternativeConstants {
    pub p: f64,
    pub q: f64,
    pub ln_eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
}

impl AlternativeConstants {
    pub fn from_params(params: &ModelParams) -> Result<Self> {
        let s = ScaleInputs::from_params(params)?;
        Ok(AlternativeConstants {
            p: params.p,
            q: params.q,
            ln_eps1: s.ln_eps1,
            eps2: params.eps2,
            eps3: params.eps3,
        })
    }

    pub fn scale_inputs(&self) -> ScaleInputs {
        ScaleInputs {
            p: self.p,
            q: self.q,
            ln_eps1: self.ln_eps1,
            eps2: self.eps2,
        }
    }

    /// `ln(ε₃^{-1}[ε₁ω]^q)`.
    pub fn ln_energy_threshold(&self, omega: f64) -> f64 {
        -self.eps3.ln() + self.q * (self.ln_eps1 + omega.ln())
    }
}

/// A lateral boundary point with the radius, oscillation and time scales
/// of the three backward cylinders `Q^i = B_r × (t0 - T^i, t0)`.
///
/// The fields are public so that demonstrations can use scales other than
/// the formula ones, whose `ω̃` is usually far below `f64` resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LateralSetting {
    pub center: Vec2,
    pub t0: f64,
    pub radius: f64,
    pub omega: f64,
    pub tilde_omega: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
}

impl LateralSetting {
    /// Time scales and `ω̃` from their formulas; underflow gives `ω̃ = 0` and overflow infinite lengths.
    pub fn from_scales(
        center: Vec2,
        t0: f64,
        radius: f64,
        omega: f64,
        constants: &AlternativeConstants,
    ) -> Result<Self> {
        let s = time_scales(omega, radius, &constants.scale_inputs())?;
        Ok(LateralSetting {
            center,
            t0,
            radius,
            omega,
            tilde_omega: s.tilde_omega.value(),
            t1: s.t1.value(),
            t2: s.t2.value(),
            t3: s.t3.value(),
        })
    }

    /// `Q^i` for `i = 1, 2, 3`.
    pub fn cylinder(&self, i: usize) -> Result<Cylinder> {
        let length = match i {
            1 => self.t1,
            2 => self.t2,
            3 => self.t3,
            _ => return Err(Error::invalid("i", "lateral cylinders are numbered 1 to 3")),
        };
        Cylinder::backward(self.center, self.t0, self.radius, length)
    }
}

/// The tag with the values that decided it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub tag: AlternativeTag,
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub b: f64,
    pub tilde_omega: f64,
    /// The sup-in-time average of `∫ H′` from `μ⁺ - 3ω̃`; only evaluated in the second alternative.
    pub energy_average: Option<f64>,
    pub ln_threshold: f64,
    /// `ε ≤ ω̃/2`.
    pub width_admissible: bool,
    /// The datum on `Q̄³ ∩ ∂_pΩ_T` stays below `μ⁺ - ω/8`.
    pub datum_gap: bool,
}

/// Sort `w` into one of the alternatives on `Q³`.
///
/// Admissibility of the jump width and of the boundary datum is reported
/// through flags; only a violated oscillation bound is an error.
pub fn classify_alternative(
    w: &GridFunction,
    setting: &LateralSetting,
    jump: &MollifiedHeaviside,
    constants: &AlternativeConstants,
) -> Result<Classification> {
    let d = w.domain();
    let q3 = setting.cylinder(3)?;
    let osc = oscillation(w, &q3)?;
    if osc > setting.omega * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "oscillation {osc} on Q3 exceeds omega = {}",
            setting.omega
        )));
    }
    let points = q3.grid_points(d);
    let (mu_minus, mu_plus) =
        points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(i, m)| {
                let v = w.value(i, m);
                (lo.min(v), hi.max(v))
            });
    let datum_sup = points
        .iter()
        .filter(|&&(i, m)| {
            matches!(
                d.kind(i, m),
                NodeKind::InitialBoundary | NodeKind::LateralBoundary
            )
        })
        .map(|&(i, m)| w.value(i, m))
        .fold(f64::NEG_INFINITY, f64::max);
    let b = jump.center();
    let tilde = setting.tilde_omega;
    let ln_threshold = constants.ln_energy_threshold(setting.omega);
    let mut out = Classification {
        tag: AlternativeTag::NoJump,
        mu_plus,
        mu_minus,
        b,
        tilde_omega: tilde,
        energy_average: None,
        ln_threshold,
        width_admissible: jump.width() <= 0.5 * tilde,
        datum_gap: datum_sup <= mu_plus - setting.omega / 8.0,
    };
    if b < mu_minus || b > mu_plus {
        return Ok(out);
    }
    if b <= mu_plus - 2.0 * tilde {
        out.tag = AlternativeTag::Alt1;
        return Ok(out);
    }
    let inner = Cylinder::backward(setting.center, setting.t0, setting.radius / 4.0, 0.0)?;
    let nodes = inner.spatial_nodes(d);
    let lo = (setting.t0 - setting.t1 / 4.0).max(0.0);
    let floor = jump.eval(mu_plus - 3.0 * tilde);
    let s = (0..=d.steps())
        .filter(|&m| (lo..=setting.t0).contains(&d.time(m)))
        .filter_map(|m| space_mean(d, &nodes, |i| jump.eval(w.value(i, m)) - floor))
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        })
        .ok_or_else(|| {
            Error::EmptyIntersection(
                "no grid points in the window of the second alternative".into(),
            )
        })?;
    out.energy_average = Some(s);
    out.tag = if s > 0.0 && s.ln() > ln_threshold {
        AlternativeTag::Alt2_1
    } else {
        AlternativeTag::Alt2_2
    };
    Ok(out)
}

/// The three level-set density statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensityStatement {
    /// `⅛Q²` above `μ⁺ - 2ε₂ω̃`, under the first alternative.
    FarJump,
    /// `½Q³` above `μ⁺ - 8ω̃`, under the second alternative.
    NearJump,
    /// `⅛Q¹` above `μ⁺ - 2ε₁ω`, under the low-energy case.
    LowEnergy,
}

impl DensityStatement {
    pub const ALL: [DensityStatement; 3] = [
        DensityStatement::FarJump,
        DensityStatement::NearJump,
        DensityStatement::LowEnergy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DensityStatement::FarJump => "density_far_jump",
            DensityStatement::NearJump => "density_near_jump",
            DensityStatement::LowEnergy => "density_low_energy",
        }
    }

    pub fn applies_to(self, tag: AlternativeTag) -> bool {
        match self {
            DensityStatement::FarJump => tag == AlternativeTag::Alt1,
            DensityStatement::NearJump => tag.is_alt2(),
            DensityStatement::LowEnergy => tag == AlternativeTag::Alt2_2,
        }
    }
}

/// Level-set fraction for one statement against `c_ell` times its shape.
///
/// The shape is compared in log form; the fitted constant is
/// `fraction/shape` and may overflow to infinity when the shape underflows.
pub fn density_estimate(
    w: &GridFunction,
    setting: &LateralSetting,
    class: &Classification,
    constants: &AlternativeConstants,
    statement: DensityStatement,
    c_ell: f64,
) -> Result<InequalityReport> {
    if !statement.applies_to(class.tag) {
        return Err(Error::Precondition(format!(
            "{} does not hold under alternative {:?}",
            statement.name(),
            class.tag
        )));
    }
    let p_conj = constants.p / (constants.p - 1.0);
    let (cyl, level, ln_shape) = match statement {
        DensityStatement::FarJump => (
            setting.cylinder(2)?.scaled(0.125),
            class.mu_plus - 2.0 * constants.eps2 * class.tilde_omega,
            -(1.0 / constants.eps2).ln().ln() / p_conj,
        ),
        DensityStatement::NearJump => (
            setting.cylinder(3)?.scaled(0.5),
            class.mu_plus - 8.0 * class.tilde_omega,
            constants.q * (constants.ln_eps1 + setting.omega.ln()),
        ),
        DensityStatement::LowEnergy => (
            setting.cylinder(1)?.scaled(0.125),
            class.mu_plus - 2.0 * (constants.ln_eps1 + setting.omega.ln()).exp(),
            -constants.eps3.ln() / constants.p - (-constants.ln_eps1).ln() / p_conj,
        ),
    };
    let d = w.domain();
    let points = cyl.grid_points(d);
    if points.len() < MIN_POINTS {
        return Ok(InequalityReport::undecided(
            statement.name(),
            format!("{} grid points in the cylinder", points.len()),
        ));
    }
    let frac = fraction(d, &points, |i, m| w.value(i, m) > level).unwrap_or(0.0);
    let shape = ln_shape.exp();
    let mut r = InequalityReport::from_terms(
        statement.name(),
        vec![NamedTerm::new("fraction", frac)],
        vec![NamedTerm::new("shape", shape)],
        None,
    );
    r.fitted_constant = if frac == 0.0 {
        0.0
    } else {
        (frac.ln() - ln_shape).exp()
    };
    r.verdict = Verdict::from_bool(frac == 0.0 || frac.ln() <= c_ell.ln() + ln_shape);
    Ok(r.with_detail(json!({
        "level": level,
        "ln_shape": ln_shape,
        "c_ell": c_ell,
        "points": points.len(),
        "tag": class.tag,
    })))
}

/// All three statements; those not covered by the tag are reported `UNDECIDED`.
pub fn density_estimates(
    w: &GridFunction,
    setting: &LateralSetting,
    class: &Classification,
    constants: &AlternativeConstants,
    c_ell: f64,
) -> Result<Vec<InequalityReport>> {
    DensityStatement::ALL
        .iter()
        .map(|&s| {
            if s.applies_to(class.tag) {
                density_estimate(w, setting, class, constants, s, c_ell)
            } else {
                Ok(InequalityReport::undecided(
                    s.name(),
                    format!("not implied by {:?}", class.tag),
                ))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::GridDomain;

    fn constants() -> AlternativeConstants {
        AlternativeConstants {
            p: 3.0,
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
            t1: 0.2,
            t2: 0.3,
            t3: 0.4,
        }
    }

    fn linear() -> GridFunction {
        let d = Arc::new(GridDomain::interval(0.0, 1.0, 32, 0.5, 0.05).unwrap());
        GridFunction::from_fn(d, |x, _| x[0])
    }

    #[test]
    fn jump_above_range_is_no_jump() {
        let w = linear();
        let h = MollifiedHeaviside::new(1.5, 0.01).unwrap();
        let c = classify_alternative(&w, &setting(1.0, 0.05), &h, &constants()).unwrap();
        assert_eq!(c.tag, AlternativeTag::NoJump);
    }

    #[test]
    fn jump_at_minimum_is_first_alternative() {
        let w = linear();
        let h = MollifiedHeaviside::new(0.0, 0.01).unwrap();
        let c = classify_alternative(&w, &setting(1.0, 0.05), &h, &constants()).unwrap();
        assert_eq!(c.tag, AlternativeTag::Alt1);
        assert!(c.width_admissible);
    }

    #[test]
    fn pinned_near_jump_is_high_energy() {
        let d = Arc::new(GridDomain::interval(0.0, 1.0, 32, 0.5, 0.05).unwrap());
        // values sit just above b - ε and reach b + ε near the corner
        let w = GridFunction::from_fn(d, |x, _| 0.5 + 0.01 * (1.0 - 2.0 * x[0]));
        let h = MollifiedHeaviside::new(0.5, 0.01).unwrap();
        let c = classify_alternative(&w, &setting(0.05, 0.02), &h, &constants()).unwrap();
        assert_eq!(c.tag, AlternativeTag::Alt2_1);
        assert!(c.energy_average.unwrap() > 0.1);
    }

    #[test]
    fn oscillation_above_omega_is_rejected() {
        let w = linear();
        let h = MollifiedHeaviside::new(0.0, 0.01).unwrap();
        assert!(matches!(
            classify_alternative(&w, &setting(0.5, 0.05), &h, &constants()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn density_fractions_and_mismatch() {
        let d = Arc::new(GridDomain::interval(0.0, 1.0, 64, 0.5, 0.01).unwrap());
        let w = GridFunction::constant(d, 0.2);
        let h = MollifiedHeaviside::new(0.0, 0.001).unwrap();
        let s = setting(1.0, 0.05);
        let c = classify_alternative(&w, &s, &h, &constants()).unwrap();
        // constant field: μ⁺ = 0.2 so every value exceeds the levels below it
        assert_eq!(c.tag, AlternativeTag::NoJump);
        let fake = Classification {
            tag: AlternativeTag::Alt1,
            mu_plus: 1.0,
            ..c
        };
        let r =
            density_estimate(&w, &s, &fake, &constants(), DensityStatement::FarJump, 1.0).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.verdict.is_pass());
        let top = Classification {
            mu_plus: 0.2,
            ..fake
        };
        let r =
            density_estimate(&w, &s, &top, &constants(), DensityStatement::FarJump, 1.0).unwrap();
        assert_eq!(r.lhs, 1.0);
        assert!(matches!(
            density_estimate(
                &w,
                &s,
                &fake,
                &constants(),
                DensityStatement::LowEnergy,
                1.0
            ),
            Err(Error::Precondition(_))
        ));
        let all = density_estimates(&w, &s, &fake, &constants(), 1.0).unwrap();
        assert_eq!(all[1].verdict, Verdict::Undecided);
    }
}
