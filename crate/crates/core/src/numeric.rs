//! Small numerical utilities: log-domain scalars, Gauss–Legendre rules,
//! least-squares fits on log-log data.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A nonnegative real number carried through its natural logarithm.
///
/// The intrinsic-scaling quantities (radii, time scales, the auxiliary
/// oscillation) go far below the smallest positive `f64` after a single
/// step, so they are stored as `ln(value)`. Zero is `ln = -inf`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogScalar {
    pub ln: f64,
}

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar {
        ln: f64::NEG_INFINITY,
    };
    pub const ONE: LogScalar = LogScalar { ln: 0.0 };

    pub fn from_ln(ln: f64) -> Self {
        LogScalar { ln }
    }

    /// Panics on negative input.
    pub fn from_value(v: f64) -> Self {
        assert!(v >= 0.0, "LogScalar::from_value: negative value {v}");
        LogScalar { ln: v.ln() }
    }

    /// Plain `f64` value; underflows to 0 and overflows to `inf`.
    pub fn value(self) -> f64 {
        self.ln.exp()
    }

    /// True when the value is a finite, normal `f64`.
    pub fn is_representable(self) -> bool {
        self.value().is_normal()
    }

    /// `self^e`; exponent zero always gives one (also for zero and infinity).
    pub fn powf(self, e: f64) -> LogScalar {
        LogScalar::from_ln(scaled_ln(e, self.ln))
    }

    pub fn log10(self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }
}

/// `e * ln`, with the convention `0 * (±inf) = 0` used for exponent collapse.
pub fn scaled_ln(e: f64, ln: f64) -> f64 {
    if e == 0.0 {
        0.0
    } else {
        e * ln
    }
}

// products of values are sums of logs
#[allow(clippy::suspicious_arithmetic_impl)]
impl std::ops::Mul for LogScalar {
    type Output = LogScalar;
    fn mul(self, other: LogScalar) -> LogScalar {
        LogScalar::from_ln(self.ln + other.ln)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl std::ops::Div for LogScalar {
    type Output = LogScalar;
    fn div(self, other: LogScalar) -> LogScalar {
        LogScalar::from_ln(self.ln - other.ln)
    }
}

impl fmt::Display for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ln == f64::NEG_INFINITY {
            return write!(f, "0");
        }
        if !self.ln.is_finite() {
            return write!(f, "inf");
        }
        let v = self.value();
        if v.is_normal() && (1e-300..1e300).contains(&v) {
            return write!(f, "{v:.17e}");
        }
        let l10 = self.log10();
        let mut exp = l10.floor();
        let mut mant = 10f64.powf(l10 - exp);
        if mant >= 9.999_999_999_999_5 {
            mant /= 10.0;
            exp += 1.0;
        }
        write!(f, "{mant:.12}e{exp:.0}")
    }
}

/// `ln(e^a + e^b)` without overflow.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre quadrature of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let mid = lo + 0.5 * h;
        for (xi, wi) in x.iter().zip(&w) {
            sum += wi * f(mid + 0.5 * h * xi);
        }
    }
    0.5 * h * sum
}

/// Least-squares line `y = slope * x + intercept` with its coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    Some(LinearFit {
        slope,
        intercept,
        r2,
    })
}

/// Fit `y ~ C x^s` by least squares on `(ln x, ln y)`; nonpositive samples are rejected.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    if xs.iter().chain(ys).any(|v| *v <= 0.0 || !v.is_finite()) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly)
}
