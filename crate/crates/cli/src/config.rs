//! The TOML run configuration and its resolution into library types.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use stefan_lab::iteration::{auto_theta, eps_constants, Anchor, ExponentPack, StructuralConstants};
use stefan_lab::model::{GridDomain, ModelParams};
use stefan_lab::solver::{BoundaryDatum, SolveConfig};

use crate::error::CliError;

/// A number or the word `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Setting {
    Auto,
    Value(f64),
}

impl Setting {
    pub fn value(self) -> Option<f64> {
        match self {
            Setting::Auto => None,
            Setting::Value(v) => Some(v),
        }
    }
}

impl<'de> Deserialize<'de> for Setting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Setting::Value(v)),
            Raw::Int(v) => Ok(Setting::Value(v as f64)),
            Raw::Text(s) if s == "auto" => Ok(Setting::Auto),
            Raw::Text(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"auto\", got \"{s}\""
            ))),
        }
    }
}

impl Serialize for Setting {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Setting::Auto => s.serialize_str("auto"),
            Setting::Value(v) => s.serialize_f64(*v),
        }
    }
}

fn auto() -> Setting {
    Setting::Auto
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "one")]
    pub n: usize,
    pub p: f64,
    #[serde(rename = "Lambda", default = "unit")]
    pub lambda: f64,
    pub a: f64,
    pub eps: f64,
    #[serde(default)]
    pub beta_kappa: f64,
    #[serde(default = "half")]
    pub delta: f64,
    #[serde(rename = "r_Omega", default = "quarter")]
    pub r_omega: f64,
    #[serde(default)]
    pub mu_reg: f64,
}

fn one() -> usize {
    1
}
fn unit() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn quarter() -> f64 {
    0.25
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub h: f64,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    /// `[lo, hi]` for a 1D run.
    pub interval: Option<[f64; 2]>,
    /// `[lo, hi]` for the square `(lo, hi)²`.
    pub square: Option<[f64; 2]>,
    /// Path to a 0/1 cell mask, relative to the config file.
    pub mask: Option<PathBuf>,
    #[serde(default)]
    pub origin: [f64; 2],
    #[serde(default)]
    pub periodic: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatumSection {
    Constant {
        value: f64,
    },
    Affine {
        offset: f64,
        slope: [f64; 2],
    },
    Holder {
        offset: f64,
        amplitude: f64,
        gamma_g: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    SeparableSine {
        #[serde(default)]
        offset: f64,
        #[serde(default)]
        slope: f64,
        amplitude: f64,
        #[serde(default)]
        rate: f64,
        #[serde(default = "unit")]
        wavenumber: f64,
    },
    HeatMode,
    Ramp {
        cold: f64,
        hot: f64,
        rise_time: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSection {
    pub q: f64,
    #[serde(default = "auto")]
    pub theta: Setting,
    #[serde(default = "tenth")]
    pub tau: f64,
    #[serde(default = "auto")]
    pub eps1: Setting,
    #[serde(default = "auto")]
    pub eps2: Setting,
    #[serde(default = "auto")]
    pub eps3: Setting,
    #[serde(default = "auto")]
    pub eps4: Setting,
    #[serde(default = "auto")]
    pub lambda0: Setting,
    #[serde(rename = "R0", default = "quarter")]
    pub r0: f64,
    #[serde(default = "unit")]
    pub c_ell: f64,
    #[serde(default = "unit")]
    pub bar_c: f64,
    #[serde(default = "unit")]
    pub tilde_c: f64,
    #[serde(default = "quarter")]
    pub alpha_tilde: f64,
    #[serde(rename = "M_tilde", default = "unit")]
    pub m_tilde: f64,
    /// Datum exponent for the exponent pack when the datum is not Hölder.
    #[serde(default = "half")]
    pub gamma: f64,
}

fn tenth() -> f64 {
    0.1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub mu_schedule: Vec<f64>,
    pub linesearch_factor: f64,
    pub linesearch_max_steps: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let c = SolveConfig::default();
        SolverSection {
            newton_tol: c.newton_tol,
            newton_max_iter: c.newton_max_iter,
            mu_schedule: c.mu_schedule,
            linesearch_factor: c.linesearch_factor,
            linesearch_max_steps: c.linesearch_max_steps,
        }
    }
}

/// A space-time probe: a point, a radius and a backward time length.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub center: [f64; 2],
    /// Defaults to the final time.
    pub t0: Option<f64>,
    pub radius: f64,
    pub length: f64,
    /// Truncation level `k` for the energy estimate.
    pub level: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFunctionSection {
    pub center: [f64; 2],
    pub radius: [f64; 2],
    /// Window `(t1, t2)`; snapped to grid levels.
    pub window: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentsSection {
    #[serde(default = "default_checks")]
    pub checks: Vec<String>,
    #[serde(default)]
    pub eps_list: Vec<f64>,
    #[serde(default = "default_sigmas")]
    pub sigmas: Vec<f64>,
    pub gradient_sigma: Option<f64>,
    #[serde(default = "tenth")]
    pub rho: f64,
    #[serde(default = "hundredth")]
    pub truncation: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_refinements")]
    pub refinements: usize,
    #[serde(default = "default_j")]
    pub j_max: usize,
    /// A hand-set `ω_j` sequence checked instead of the built one.
    pub omega_sequence: Option<Vec<f64>>,
    #[serde(default = "default_thetas")]
    pub thetas: Vec<f64>,
    pub probe: Option<ProbeSection>,
    pub test_function: Option<TestFunctionSection>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

fn default_checks() -> Vec<String> {
    vec!["max_principle".into(), "oscillation".into()]
}
fn default_sigmas() -> Vec<f64> {
    vec![0.2, 0.1, 0.05, 0.025]
}
fn hundredth() -> f64 {
    0.01
}
fn default_samples() -> usize {
    1000
}
fn default_refinements() -> usize {
    3
}
fn default_j() -> usize {
    30
}
fn default_thetas() -> Vec<f64> {
    vec![0.5, 0.25, 0.125, 0.0625, 0.03125]
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl Default for ExperimentsSection {
    fn default() -> Self {
        toml::from_str("").expect("every experiments field has a default")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub grid: GridSection,
    pub datum: DatumSection,
    pub constants: ConstantsSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub experiments: ExperimentsSection,
}

/// Values that were `"auto"` in the file, after resolution.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConstants {
    pub theta: f64,
    pub eps1: Option<f64>,
    pub ln_eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub eps4: f64,
    pub lambda0_ln_ln: f64,
    pub alpha: f64,
}

/// A configuration ready to run.
pub struct Resolved {
    pub config: RunConfig,
    pub constants: ResolvedConstants,
    pub params: ModelParams,
    pub exponents: ExponentPack,
    pub datum: BoundaryDatum,
    pub solve: SolveConfig,
    pub domain: Arc<GridDomain>,
    pub hash: String,
    pub out: PathBuf,
    /// Directory of the config file; relative paths inside it start here.
    pub base: PathBuf,
}

impl fmt::Debug for Resolved {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Resolved")
            .field("hash", &self.hash)
            .finish_non_exhaustive()
    }
}

/// Library errors raised while resolving are configuration errors.
fn cfg(e: stefan_lab::Error) -> CliError {
    CliError::Config(e.to_string())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<(Self, PathBuf), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((config, base))
    }

    /// The datum exponent `γ`: the Hölder exponent when the datum has one.
    fn gamma(&self) -> f64 {
        match self.datum {
            DatumSection::Holder { gamma_g, .. } => gamma_g,
            _ => self.constants.gamma,
        }
    }

    pub fn datum(&self, dim: usize) -> BoundaryDatum {
        match self.datum {
            DatumSection::Constant { value } => BoundaryDatum::Constant(value),
            DatumSection::Affine { offset, slope } => BoundaryDatum::Affine { offset, slope },
            DatumSection::Holder {
                offset,
                amplitude,
                gamma_g,
                center,
            } => BoundaryDatum::Holder {
                offset,
                amplitude,
                exponent: gamma_g,
                center,
            },
            DatumSection::SeparableSine {
                offset,
                slope,
                amplitude,
                rate,
                wavenumber,
            } => BoundaryDatum::SeparableSine {
                offset,
                slope,
                amplitude,
                rate,
                wavenumber,
                dim,
            },
            DatumSection::HeatMode => BoundaryDatum::heat_mode(),
            DatumSection::Ramp {
                cold,
                hot,
                rise_time,
            } => BoundaryDatum::Ramp {
                cold,
                hot,
                rise_time,
            },
        }
    }

    /// The grid with spacing and step both multiplied by `coarsen`.
    pub fn domain(&self, base: &Path, coarsen: usize) -> Result<GridDomain, CliError> {
        let g = &self.grid;
        let (h, dt) = (g.h * coarsen as f64, g.dt * coarsen as f64);
        let cells_of = |lo: f64, hi: f64| -> Result<usize, CliError> {
            let c = (hi - lo) / h;
            let n = c.round();
            if !(n >= 1.0) || (c - n).abs() > 1e-9 * n {
                return Err(CliError::Config(format!(
                    "grid.h = {h} does not divide the domain length {}",
                    hi - lo
                )));
            }
            Ok(n as usize)
        };
        let given = [g.interval.is_some(), g.square.is_some(), g.mask.is_some()];
        if given.iter().filter(|b| **b).count() != 1 {
            return Err(CliError::Config(
                "grid needs exactly one of `interval`, `square` or `mask`".into(),
            ));
        }
        let d = if let Some([lo, hi]) = g.interval {
            let cells = cells_of(lo, hi)?;
            if g.periodic {
                GridDomain::periodic_interval(lo, hi, cells, g.t_final, dt)
            } else {
                GridDomain::interval(lo, hi, cells, g.t_final, dt)
            }
        } else if let Some([lo, hi]) = g.square {
            GridDomain::square(lo, hi, cells_of(lo, hi)?, g.t_final, dt)
        } else {
            let path = base.join(g.mask.as_ref().expect("checked above"));
            let text = std::fs::read_to_string(&path).map_err(|e| {
                CliError::Config(format!("cannot read mask {}: {e}", path.display()))
            })?;
            if coarsen != 1 {
                return Err(CliError::Config("mask grids cannot be coarsened".into()));
            }
            let (nx, ny, mask) = GridDomain::parse_mask(&text).map_err(cfg)?;
            GridDomain::from_mask(h, g.origin, nx, ny, mask, g.t_final, dt)
        };
        d.map_err(cfg)
    }

    /// Resolve `"auto"` fields, build every library object and hash the result.
    pub fn resolve(
        mut self,
        base: &Path,
        out_override: Option<PathBuf>,
        seed: Option<u64>,
    ) -> Result<Resolved, CliError> {
        if let Some(s) = seed {
            self.experiments.seed = s;
        }
        if let Some(o) = out_override {
            self.experiments.out = o;
        }
        let domain = self.domain(base, 1)?;
        let m = &self.model;
        let c = &self.constants;
        let exponents = ExponentPack::new(m.n, m.p, c.q, self.gamma()).map_err(cfg)?;
        let alpha = exponents.alpha;
        let defaults = ModelParams::new(1, 2.0, 3.0).map_err(cfg)?;
        let eps2 = c.eps2.value().unwrap_or(defaults.eps2);
        let eps4 = c.eps4.value().unwrap_or(defaults.eps4);
        let structural = StructuralConstants {
            c_ell: c.c_ell,
            bar_c: c.bar_c,
            tilde_c: c.tilde_c,
        };
        let formula = eps_constants(&exponents, &structural, eps2).map_err(cfg)?;
        let (eps1, ln_eps1) = match c.eps1.value() {
            Some(v) => (Some(v), v.ln()),
            None => (formula.eps1, formula.ln_eps1),
        };
        let eps3 = c.eps3.value().unwrap_or(formula.eps3);
        let theta = match c.theta.value() {
            Some(v) => v,
            None => auto_theta(c.tau, alpha, m.p, eps4, c.alpha_tilde, c.m_tilde).map_err(cfg)?,
        };
        let lambda0_ln_ln = match c.lambda0.value() {
            Some(v) => Anchor::from_value(v).map_err(cfg)?.ln_ln(),
            None => Anchor::canonical(theta, alpha).map_err(cfg)?.ln_ln(),
        };
        let params = ModelParams {
            n: m.n,
            p: m.p,
            lambda: m.lambda,
            a: m.a,
            eps: m.eps,
            delta: m.delta,
            r_omega: m.r_omega,
            q: c.q,
            theta,
            tau: c.tau,
            eps1,
            eps2,
            eps3,
            eps4,
            lambda0_ln_ln,
            r0: c.r0,
            beta_kappa: m.beta_kappa,
            mu_reg: m.mu_reg,
            alpha_tilde: c.alpha_tilde,
            m_tilde: c.m_tilde,
        };
        params.validate().map_err(cfg)?;
        let ex = &self.experiments;
        if ex.sigmas.is_empty() || ex.sigmas.iter().any(|s| !(*s > 0.0)) {
            return Err(CliError::Config(
                "experiments.sigmas must be a nonempty list of positive levels".into(),
            ));
        }
        if ex.samples == 0 {
            return Err(CliError::Config(
                "experiments.samples must be positive".into(),
            ));
        }
        let s = &self.solver;
        let solve = SolveConfig {
            newton_tol: s.newton_tol,
            newton_max_iter: s.newton_max_iter,
            mu_schedule: s.mu_schedule.clone(),
            linesearch_factor: s.linesearch_factor,
            linesearch_max_steps: s.linesearch_max_steps,
        };
        solve.validate().map_err(cfg)?;
        let constants = ResolvedConstants {
            theta,
            eps1,
            ln_eps1,
            eps2,
            eps3,
            eps4,
            lambda0_ln_ln,
            alpha,
        };
        let datum = self.datum(domain.dim());
        let hash = config_hash(&self, &constants)?;
        let out = self.experiments.out.clone();
        Ok(Resolved {
            config: self,
            constants,
            params,
            exponents,
            datum,
            solve,
            domain: Arc::new(domain),
            hash,
            out,
            base: base.to_path_buf(),
        })
    }
}

/// The resolved configuration as JSON; the hash is taken over these bytes.
pub fn resolved_json(config: &RunConfig, constants: &ResolvedConstants) -> serde_json::Value {
    let mut experiments = serde_json::to_value(&config.experiments).unwrap_or_default();
    // the output location does not change any result
    if let Some(map) = experiments.as_object_mut() {
        map.remove("out");
    }
    serde_json::json!({
        "model": &config.model,
        "grid": &config.grid,
        "datum": &config.datum,
        "constants": &config.constants,
        "resolved": constants,
        "solver": &config.solver,
        "experiments": experiments,
    })
}

fn config_hash(config: &RunConfig, constants: &ResolvedConstants) -> Result<String, CliError> {
    let bytes = serde_json::to_vec(&resolved_json(config, constants))
        .map_err(|e| CliError::Config(format!("cannot serialize the resolved config: {e}")))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [model]
        p = 3.0
        a = 0.0
        eps = 0.1
        [grid]
        h = 0.05
        dt = 0.01
        T = 0.1
        interval = [0.0, 1.0]
        [datum]
        kind = "constant"
        value = 0.3
        [constants]
        q = 3.0
    "#;

    fn resolved(text: &str) -> Result<Resolved, CliError> {
        let c: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        c.resolve(Path::new("."), None, None)
    }

    #[test]
    fn auto_fields_are_resolved() {
        let r = resolved(MINIMAL).unwrap();
        assert!(r.constants.theta > 0.0 && r.constants.theta < 0.5);
        assert_eq!(r.domain.node_count(), 21);
        assert_eq!(r.hash.len(), 64);
    }

    #[test]
    fn seed_changes_the_hash_but_out_does_not() {
        let a = resolved(MINIMAL).unwrap();
        let c: RunConfig = toml::from_str(MINIMAL).unwrap();
        let b = c
            .clone()
            .resolve(Path::new("."), Some("elsewhere".into()), None)
            .unwrap();
        let s = c.resolve(Path::new("."), None, Some(9)).unwrap();
        assert_eq!(a.hash, b.hash);
        assert_ne!(a.hash, s.hash);
    }

    #[test]
    fn critical_q_names_the_field() {
        let err = resolved(&MINIMAL.replace("q = 3.0", "q = 2.0")).unwrap_err();
        assert!(
            matches!(err, CliError::Config(ref m) if m.contains("`q`")),
            "{err}"
        );
    }

    #[test]
    fn words_other_than_auto_are_rejected() {
        let text = MINIMAL.replace("q = 3.0", "q = 3.0\ntheta = \"large\"");
        assert!(resolved(&text).is_err());
    }

    #[test]
    fn mismatched_spacing_is_rejected() {
        assert!(resolved(&MINIMAL.replace("h = 0.05", "h = 0.3")).is_err());
    }
}
