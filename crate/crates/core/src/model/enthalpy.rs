use serde::{Deserialize, Serialize};

use super::MollifiedHeaviside;

/// The enthalpy map `s ↦ s + H(s)`; its derivative is at least one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnthalpyMap {
    heaviside: MollifiedHeaviside,
}

impl EnthalpyMap {
    pub fn new(heaviside: MollifiedHeaviside) -> Self {
        EnthalpyMap { heaviside }
    }

    pub fn heaviside(&self) -> &MollifiedHeaviside {
        &self.heaviside
    }

    pub fn eval(&self, s: f64) -> f64 {
        s + self.heaviside.eval(s)
    }

    pub fn deriv(&self, s: f64) -> f64 {
        1.0 + self.heaviside.deriv(s)
    }

    /// Inverse with `|𝓗(s) - e| ≤ 1e-12·max(1, |e|)`.
    pub fn invert(&self, e: f64) -> f64 {
        let lower = self.heaviside.center() - self.heaviside.width();
        let upper = self.heaviside.center() + self.heaviside.width();
        if e <= lower {
            return e;
        }
        if e - 1.0 >= upper {
            return e - 1.0;
        }
        // tighter than the contract so round trips in `s` also hold at that level
        let tol = 1e-14 * e.abs().max(1.0);
        // 𝓗(s) ∈ [s, s + 1] brackets the root in [e - 1, e]
        let (mut lo, mut hi) = ((e - 1.0).max(lower), e.min(upper + 1.0));
        let mut s = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = self.eval(s) - e;
            if f.abs() <= tol {
                return s;
            }
            if f > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let newton = s - f / self.deriv(s);
            s = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn map() -> EnthalpyMap {
        EnthalpyMap::new(MollifiedHeaviside::new(0.0, 0.1).unwrap())
    }

    #[test]
    fn examples() {
        let m = map();
        assert!(m.invert(m.eval(0.0)).abs() < 1e-12);
        assert_eq!(m.invert(-0.1), -0.1);
        let s = m.invert(m.eval(0.2));
        assert!((s - 0.2).abs() < 1e-12);
    }

    #[test]
    fn round_trip_on_dense_grid() {
        let m = map();
        for i in 0..=20_000 {
            let s = -10.0 + i as f64 * 1e-3;
            let back = m.invert(m.eval(s));
            assert!((back - s).abs() <= 1e-12, "s = {s}, back = {back}");
        }
    }

    proptest! {
        #[test]
        fn derivative_at_least_one(a in -1.0f64..1.0, eps in 1e-3f64..0.5, s in -3.0f64..3.0) {
            let m = EnthalpyMap::new(MollifiedHeaviside::new(a, eps).unwrap());
            prop_assert!(m.deriv(s) >= 1.0);
        }

        #[test]
        fn inversion_residual(a in -1.0f64..1.0, eps in 1e-3f64..0.5, e in -10.0f64..10.0) {
            let m = EnthalpyMap::new(MollifiedHeaviside::new(a, eps).unwrap());
            let s = m.invert(e);
            prop_assert!((m.eval(s) - e).abs() <= 1e-12 * e.abs().max(1.0));
        }
    }
}
