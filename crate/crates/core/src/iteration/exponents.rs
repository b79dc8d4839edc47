use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::bar_q;

/// Sobolev-type exponent; `Infinite` is a tag, never a float infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Kappa {
    Finite(f64),
    Infinite,
}

impl Kappa {
    /// `1/κ`, zero for the infinite tag.
    pub fn reciprocal(&self) -> f64 {
        match *self {
            Kappa::Finite(k) => 1.0 / k,
            Kappa::Infinite => 0.0,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Kappa::Infinite)
    }
}

/// `n/(n-p)` if `p < n`, `q/(q-2)` if `p = n`, infinite if `p > n`.
///
/// ```
/// use stefan_lab::iteration::{kappa_of, Kappa};
/// assert_eq!(kappa_of(3, 2.0, 5.0), Kappa::Finite(3.0));
/// assert_eq!(kappa_of(2, 2.0, 4.0), Kappa::Finite(2.0));
/// assert_eq!(kappa_of(2, 3.0, 4.0), Kappa::Infinite);
/// ```
pub fn kappa_of(n: usize, p: f64, q: f64) -> Kappa {
    let nf = n as f64;
    if p < nf {
        Kappa::Finite(nf / (nf - p))
    } else if p == nf {
        Kappa::Finite(q / (q - 2.0))
    } else {
        Kappa::Infinite
    }
}

/// Exponents derived from `(n, p, q)` plus the datum exponent `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPack {
    pub n: usize,
    pub p: f64,
    pub p_conj: f64,
    pub q: f64,
    pub q_bar: f64,
    pub alpha: f64,
    pub kappa: Kappa,
    pub gamma: f64,
    /// Absorption exponent `(1-1/q)(2-1/κ) - 1`.
    pub zeta: f64,
}

impl ExponentPack {
    pub fn new(n: usize, p: f64, q: f64, gamma: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "dimension must be positive"));
        }
        if !(p >= 2.0 && p.is_finite()) {
            return Err(Error::invalid("p", format!("must be at least 2, got {p}")));
        }
        let q_bar = bar_q(n, p);
        if !(q > q_bar && q.is_finite()) {
            return Err(Error::invalid(
                "q",
                format!("must exceed the critical exponent {q_bar}, got {q}"),
            ));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::invalid(
                "gamma",
                format!("datum exponent must lie in (0, 1), got {gamma}"),
            ));
        }
        let p_conj = p / (p - 1.0);
        let kappa = kappa_of(n, p, q);
        let product = (1.0 - 1.0 / q) * (2.0 - kappa.reciprocal());
        if !(product > 1.0) {
            return Err(Error::Invariant {
                index: 0,
                what: format!("(1-1/q)(2-1/kappa) = {product} is not above 1"),
            });
        }
        Ok(ExponentPack {
            n,
            p,
            p_conj,
            q,
            q_bar,
            alpha: 1.0 / (p_conj * q),
            kappa,
            gamma,
            zeta: product - 1.0,
        })
    }

    /// Upper end of the admissible range for `α`.
    pub fn alpha_cap(&self) -> f64 {
        1.0 / (self.p_conj * self.q_bar)
    }

    /// `q̄ = 1 + κ/(κ-1)` evaluated on the critical exponent's own `κ`.
    pub fn q_bar_from_kappa(&self) -> f64 {
        match kappa_of(self.n, self.p, self.q) {
            Kappa::Finite(k) if self.p < self.n as f64 => 1.0 + k / (k - 1.0),
            _ => 2.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa_of(3, 2.0, 7.0), Kappa::Finite(3.0));
        assert_eq!(kappa_of(2, 2.0, 4.0), Kappa::Finite(2.0));
        assert!(kappa_of(2, 3.0, 4.0).is_infinite());
        assert_eq!(Kappa::Infinite.reciprocal(), 0.0);
    }

    #[test]
    fn one_dimension_uses_infinite_kappa() {
        let e = ExponentPack::new(1, 2.0, 3.0, 0.5).unwrap();
        assert!(e.kappa.is_infinite());
        assert!((e.zeta - (2.0 * (1.0 - 1.0 / 3.0) - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn critical_q_is_rejected() {
        assert!(ExponentPack::new(3, 2.0, 2.5, 0.5).is_err());
        assert!(ExponentPack::new(2, 3.0, 2.0, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn kappaq_strict(n in 1usize..5, p in 2.0f64..6.0, dq in 1e-3f64..5.0) {
            let q = bar_q(n, p) + dq;
            let e = ExponentPack::new(n, p, q, 0.5).unwrap();
            prop_assert!((1.0 - 1.0 / e.q) * (2.0 - e.kappa.reciprocal()) > 1.0);
            prop_assert!(e.zeta > 0.0);
            prop_assert!(e.alpha > 0.0 && e.alpha < e.alpha_cap());
            prop_assert!((e.q_bar_from_kappa() - e.q_bar).abs() < 1e-12);
        }
    }
}
