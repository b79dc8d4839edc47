use std::fmt;

use serde::{Deserialize, Serialize};

/// Outcome of a check; `Undecided` when the grid cannot support a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Undecided,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Undecided => "UNDECIDED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedTerm {
    pub name: String,
    pub value: f64,
}

impl NamedTerm {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        NamedTerm {
            name: name.into(),
            value,
        }
    }
}

/// Both sides of an estimate `lhs ≤ c·rhs` and the constant that fits it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub lhs_terms: Vec<NamedTerm>,
    pub rhs: f64,
    pub rhs_terms: Vec<NamedTerm>,
    /// `lhs/rhs`; zero when both vanish.
    pub fitted_constant: f64,
    /// Fitted constants across grid levels or parameter values, when collected.
    pub refinement_series: Vec<f64>,
    pub verdict: Verdict,
    /// Free-form detail kept for the JSON blob.
    pub detail: serde_json::Value,
}

impl InequalityReport {
    /// Build from terms; passes iff the fitted constant is finite and within `bound`.
    pub fn from_terms(
        name: impl Into<String>,
        lhs_terms: Vec<NamedTerm>,
        rhs_terms: Vec<NamedTerm>,
        bound: Option<f64>,
    ) -> Self {
        let lhs: f64 = lhs_terms.iter().map(|t| t.value).sum();
        let rhs: f64 = rhs_terms.iter().map(|t| t.value).sum();
        let fitted = fit(lhs, rhs);
        let finite_terms = lhs_terms
            .iter()
            .chain(&rhs_terms)
            .all(|t| t.value.is_finite() && t.value >= 0.0);
        let ok = finite_terms && fitted.is_finite() && bound.is_none_or(|b| fitted <= b);
        InequalityReport {
            name: name.into(),
            lhs,
            lhs_terms,
            rhs,
            rhs_terms,
            fitted_constant: fitted,
            refinement_series: Vec::new(),
            verdict: Verdict::from_bool(ok),
            detail: serde_json::Value::Null,
        }
    }

    /// A report that abstains; sides are left as `NaN`.
    pub fn undecided(name: impl Into<String>, reason: impl Into<String>) -> Self {
        InequalityReport {
            name: name.into(),
            lhs: f64::NAN,
            lhs_terms: Vec::new(),
            rhs: f64::NAN,
            rhs_terms: Vec::new(),
            fitted_constant: f64::NAN,
            refinement_series: Vec::new(),
            verdict: Verdict::Undecided,
            detail: serde_json::json!({ "reason": reason.into() }),
        }
    }

    pub fn with_detail(mut self, detail: serde_json::Value) -> Self {
        self.detail = detail;
        self
    }

    pub const CSV_HEADER: &'static str = "name,lhs,rhs,fitted_c,verdict";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:e},{:e},{:e},{}",
            self.name, self.lhs, self.rhs, self.fitted_constant, self.verdict
        )
    }

    pub fn json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

pub(crate) fn fit(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else if rhs == 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    }
}

/// `|b - a|/|a|` for the change of a fitted constant between two grids.
pub fn relative_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (b - a).abs() / a.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuous_estimate_passes_with_zero_constant() {
        let r = InequalityReport::from_terms(
            "x",
            vec![NamedTerm::new("a", 0.0)],
            vec![NamedTerm::new("b", 0.0)],
            None,
        );
        assert_eq!(r.fitted_constant, 0.0);
        assert!(r.verdict.is_pass());
        assert_eq!(r.csv_row(), "x,0e0,0e0,0e0,PASS");
    }

    #[test]
    fn unbounded_ratio_fails() {
        let r = InequalityReport::from_terms(
            "x",
            vec![NamedTerm::new("a", 1.0)],
            vec![NamedTerm::new("b", 0.0)],
            None,
        );
        assert_eq!(r.verdict, Verdict::Fail);
        let u = InequalityReport::undecided("y", "too few nodes");
        assert!(u.csv_row().ends_with("UNDECIDED"));
        assert_eq!(u.json()["verdict"], "UNDECIDED");
    }
}
