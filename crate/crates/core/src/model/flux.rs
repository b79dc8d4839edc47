use serde::{Deserialize, Serialize};

use super::BetaMap;
use crate::error::{Error, Result};

/// Points and vectors; the second component is zero in one dimension.
pub type Vec2 = [f64; 2];

/// Scalar coefficient `c(x, t)` in front of the p-Laplacian flux.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coefficient {
    Unit,
    /// `1 + amplitude·sin(2πx₁)·cos(t)`, smooth in `x` and `t`.
    Smooth {
        amplitude: f64,
    },
}

impl Coefficient {
    pub fn eval(&self, x: Vec2, t: f64) -> f64 {
        match *self {
            Coefficient::Unit => 1.0,
            Coefficient::Smooth { amplitude } => {
                1.0 + amplitude * (2.0 * std::f64::consts::PI * x[0]).sin() * t.cos()
            }
        }
    }

    fn range(&self) -> (f64, f64) {
        match *self {
            Coefficient::Unit => (1.0, 1.0),
            Coefficient::Smooth { amplitude } => (1.0 - amplitude, 1.0 + amplitude),
        }
    }
}

/// Shape of a continuity modulus, kept only as a descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ModulusShape {
    /// The field does not depend on this argument.
    Zero,
    /// `r ↦ constant·r^exponent`.
    Holder { constant: f64, exponent: f64 },
}

impl ModulusShape {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            ModulusShape::Zero => 0.0,
            ModulusShape::Holder { constant, exponent } => constant * r.max(0.0).powf(exponent),
        }
    }
}

/// Continuity descriptors of the field in `u` and in `ξ` on bounded sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldModuli {
    pub in_u: ModulusShape,
    pub in_gradient: ModulusShape,
}

/// The flux `c(x,t)·(|ξ|² + μ²)^{(p-2)/2}·ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    p: f64,
    coefficient: Coefficient,
}

impl VectorField {
    pub fn p_laplacian(p: f64) -> Result<Self> {
        VectorField::with_coefficient(p, Coefficient::Unit)
    }

    pub fn with_coefficient(p: f64, coefficient: Coefficient) -> Result<Self> {
        if !(p >= 2.0 && p.is_finite()) {
            return Err(Error::invalid(
                "p",
                format!("exponent must be at least 2, got {p}"),
            ));
        }
        if let Coefficient::Smooth { amplitude } = coefficient {
            if !(0.0..1.0).contains(&amplitude) {
                return Err(Error::invalid(
                    "coefficient.amplitude",
                    "must lie in [0, 1)",
                ));
            }
        }
        Ok(VectorField { p, coefficient })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn coefficient(&self) -> Coefficient {
        self.coefficient
    }

    /// Smallest `Λ` with growth `≤ Λ|ξ|^{p-1}` and coercivity `≥ Λ^{-1}|ξ|^p`.
    pub fn structure_constant(&self) -> f64 {
        let (lo, hi) = self.coefficient.range();
        hi.max(1.0 / lo)
    }

    pub fn moduli(&self) -> FieldModuli {
        let in_gradient = if self.p == 2.0 {
            ModulusShape::Holder {
                constant: self.structure_constant(),
                exponent: 1.0,
            }
        } else {
            ModulusShape::Holder {
                constant: self.structure_constant() * (self.p - 1.0),
                exponent: (self.p - 2.0).min(1.0),
            }
        };
        FieldModuli {
            in_u: ModulusShape::Zero,
            in_gradient,
        }
    }

    /// The flux at `(x, t)`; it does not depend on `u` for the built-in families.
    pub fn eval(&self, x: Vec2, t: f64, _u: f64, xi: Vec2, mu: f64) -> Vec2 {
        let c = self.coefficient.eval(x, t);
        let g = c * power_factor(self.p, xi, mu);
        [g * xi[0], g * xi[1]]
    }

    /// Derivative of the flux in the gradient argument, a symmetric 2×2 matrix.
    pub fn deriv_gradient(&self, x: Vec2, t: f64, xi: Vec2, mu: f64) -> [[f64; 2]; 2] {
        let c = self.coefficient.eval(x, t);
        let s = xi[0] * xi[0] + xi[1] * xi[1] + mu * mu;
        if self.p == 2.0 {
            return [[c, 0.0], [0.0, c]];
        }
        if s == 0.0 {
            return [[0.0, 0.0], [0.0, 0.0]];
        }
        let base = c * s.powf(0.5 * (self.p - 2.0));
        let extra = c * (self.p - 2.0) * s.powf(0.5 * (self.p - 4.0));
        [
            [base + extra * xi[0] * xi[0], extra * xi[0] * xi[1]],
            [extra * xi[1] * xi[0], base + extra * xi[1] * xi[1]],
        ]
    }

    /// The field seen by `w = β(u)`: `𝓐(β⁻¹(w), ξ/β'(β⁻¹(w)))`.
    pub fn transformed(&self, beta: &BetaMap, x: Vec2, t: f64, w: f64, xi: Vec2, mu: f64) -> Vec2 {
        let u = beta.inverse(w);
        let b = beta.deriv(u);
        self.eval(x, t, u, [xi[0] / b, xi[1] / b], mu)
    }

    /// Derivatives of the transformed field in `ξ` and in `w`.
    pub fn transformed_jacobian(
        &self,
        beta: &BetaMap,
        x: Vec2,
        t: f64,
        w: f64,
        xi: Vec2,
        mu: f64,
    ) -> ([[f64; 2]; 2], Vec2) {
        let u = beta.inverse(w);
        let b = beta.deriv(u);
        let eta = [xi[0] / b, xi[1] / b];
        let d = self.deriv_gradient(x, t, eta, mu);
        let dxi = [[d[0][0] / b, d[0][1] / b], [d[1][0] / b, d[1][1] / b]];
        // dη/dw = -η·β''(u)/β'(u)²
        let db_dw = beta.second_deriv(u) / b;
        let deta = [-eta[0] * db_dw / b, -eta[1] * db_dw / b];
        let dw = [
            d[0][0] * deta[0] + d[0][1] * deta[1],
            d[1][0] * deta[0] + d[1][1] * deta[1],
        ];
        (dxi, dw)
    }
}

fn power_factor(p: f64, xi: Vec2, mu: f64) -> f64 {
    if p == 2.0 {
        return 1.0;
    }
    let s = xi[0] * xi[0] + xi[1] * xi[1] + mu * mu;
    if s == 0.0 {
        0.0
    } else {
        s.powf(0.5 * (p - 2.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn norm(v: Vec2) -> f64 {
        (v[0] * v[0] + v[1] * v[1]).sqrt()
    }

    #[test]
    fn examples() {
        let f = VectorField::p_laplacian(3.0).unwrap();
        assert_eq!(f.eval([0.0; 2], 0.0, 0.0, [0.0, 0.0], 0.0), [0.0, 0.0]);
        let f2 = VectorField::p_laplacian(2.0).unwrap();
        assert_eq!(f2.eval([0.0; 2], 0.0, 0.0, [1.5, -2.0], 0.0), [1.5, -2.0]);
        let f4 = VectorField::p_laplacian(4.0).unwrap();
        assert_eq!(f4.eval([0.0; 2], 0.0, 0.0, [2.0, 0.0], 0.0), [8.0, 0.0]);
    }

    #[test]
    fn structure_bounds_on_random_gradients() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100_000 {
            let p: f64 = rng.gen_range(2.0..5.0);
            let f = VectorField::p_laplacian(p).unwrap();
            let xi = [rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)];
            let a = f.eval([0.0; 2], 0.0, 0.0, xi, 0.0);
            let m = norm(xi);
            assert!(norm(a) <= m.powf(p - 1.0) * (1.0 + 1e-12));
            assert!(a[0] * xi[0] + a[1] * xi[1] >= m.powf(p) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn transformed_field_bounds_with_beta() {
        // |Ā| ≤ Λ^p |ξ|^{p-1} and ⟨Ā, ξ⟩ ≥ Λ^{-p}|ξ|^p with Λ = Λ_β
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20_000 {
            let p: f64 = rng.gen_range(2.0..4.0);
            let beta = BetaMap::new(rng.gen_range(0.0..0.8)).unwrap();
            let l = beta.lipschitz();
            let f = VectorField::p_laplacian(p).unwrap();
            let xi = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            let w = rng.gen_range(-4.0..4.0);
            let a = f.transformed(&beta, [0.0; 2], 0.0, w, xi, 0.0);
            let m = norm(xi);
            assert!(norm(a) <= l.powf(p) * m.powf(p - 1.0) * (1.0 + 1e-12));
            assert!(a[0] * xi[0] + a[1] * xi[1] >= l.powf(-p) * m.powf(p) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let beta = BetaMap::new(0.4).unwrap();
        let f = VectorField::with_coefficient(3.0, Coefficient::Smooth { amplitude: 0.3 }).unwrap();
        let (x, t, w, xi, mu) = ([0.3, 0.1], 0.2, 0.7, [0.8, -0.5], 1e-2);
        let (dxi, dw) = f.transformed_jacobian(&beta, x, t, w, xi, mu);
        let h = 1e-6;
        for k in 0..2 {
            let mut xp = xi;
            let mut xm = xi;
            xp[k] += h;
            xm[k] -= h;
            let ap = f.transformed(&beta, x, t, w, xp, mu);
            let am = f.transformed(&beta, x, t, w, xm, mu);
            for l in 0..2 {
                assert!(((ap[l] - am[l]) / (2.0 * h) - dxi[l][k]).abs() < 1e-7);
            }
        }
        let ap = f.transformed(&beta, x, t, w + h, xi, mu);
        let am = f.transformed(&beta, x, t, w - h, xi, mu);
        for l in 0..2 {
            assert!(((ap[l] - am[l]) / (2.0 * h) - dw[l]).abs() < 1e-7);
        }
    }

    proptest! {
        #[test]
        fn strictly_monotone(p in 2.0f64..5.0, a0 in -3.0f64..3.0, a1 in -3.0f64..3.0,
                             b0 in -3.0f64..3.0, b1 in -3.0f64..3.0) {
            prop_assume!((a0 - b0).abs() + (a1 - b1).abs() > 1e-6);
            let f = VectorField::p_laplacian(p).unwrap();
            let fa = f.eval([0.0; 2], 0.0, 0.0, [a0, a1], 0.0);
            let fb = f.eval([0.0; 2], 0.0, 0.0, [b0, b1], 0.0);
            let pairing = (fa[0] - fb[0]) * (a0 - b0) + (fa[1] - fb[1]) * (a1 - b1);
            prop_assert!(pairing > 0.0);
        }
    }
}
