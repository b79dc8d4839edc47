//! Sparse linear algebra for the Newton steps: a tridiagonal direct solver
//! and preconditioned conjugate gradients on a compressed-row matrix.

use crate::error::{Error, Result};

/// Solve a tridiagonal system in place by the Thomas algorithm.
///
/// `lower[i]` multiplies `x[i-1]` in row `i`, `upper[i]` multiplies `x[i+1]`;
/// `lower[0]` and `upper[n-1]` are ignored.
pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let n = diag.len();
    if lower.len() != n || upper.len() != n || rhs.len() != n {
        return Err(Error::LinearSolve(
            "tridiagonal: inconsistent lengths".into(),
        ));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(Error::LinearSolve(
            "tridiagonal: zero pivot in row 0".into(),
        ));
    }
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i] * c[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::LinearSolve(format!(
                "tridiagonal: zero pivot in row {i}"
            )));
        }
        c[i] = if i + 1 < n { upper[i] / pivot } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

/// Compressed sparse row matrix assembled from triplets.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Duplicate entries are summed in a fixed order so assembly is deterministic.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().expect("entry exists") += v;
                continue;
            }
            cols.push(c);
            vals.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            *o = (self.row_ptr[i]..self.row_ptr[i + 1])
                .map(|k| self.vals[k] * x[self.cols[k]])
                .sum();
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for (i, di) in d.iter_mut().enumerate() {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.cols[k] == i {
                    *di = self.vals[k];
                }
            }
        }
        d
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned conjugate gradients for a symmetric positive definite matrix.
///
/// Stops when the max-norm of the residual drops below `tol`.
pub fn pcg(a: &CsrMatrix, rhs: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = a.dim();
    let diag = a.diagonal();
    if diag.iter().any(|d| *d <= 0.0 || !d.is_finite()) {
        return Err(Error::LinearSolve("pcg: nonpositive diagonal".into()));
    }
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    if max_norm(&r) <= tol {
        return Ok(x);
    }
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for _ in 0..max_iter {
        a.mul_vec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            return Err(Error::LinearSolve(
                "pcg: matrix not positive definite".into(),
            ));
        }
        let step = rz / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        if max_norm(&r) <= tol {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::LinearSolve(format!(
        "pcg: no convergence in {max_iter} iterations (residual {:.3e})",
        max_norm(&r)
    )))
}

pub fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_solves_laplacian() {
        let n = 50;
        let lower = vec![-1.0; n];
        let upper = vec![-1.0; n];
        let diag = vec![2.0; n];
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.1).sin()).collect();
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            rhs[i] = 2.0 * x_true[i];
            if i > 0 {
                rhs[i] -= x_true[i - 1];
            }
            if i + 1 < n {
                rhs[i] -= x_true[i + 1];
            }
        }
        let x = solve_tridiagonal(&lower, &diag, &upper, &rhs).unwrap();
        for (a, b) in x.iter().zip(&x_true) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn pcg_matches_tridiagonal() {
        let n = 30;
        let mut trip = Vec::new();
        for i in 0..n {
            trip.push((i, i, 3.0));
            if i > 0 {
                trip.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                trip.push((i, i + 1, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, trip);
        let rhs: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let x = pcg(&a, &rhs, 1e-13, 500).unwrap();
        let y = solve_tridiagonal(&vec![-1.0; n], &vec![3.0; n], &vec![-1.0; n], &rhs).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn duplicate_triplets_are_summed() {
        let a = CsrMatrix::from_triplets(2, vec![(0, 0, 1.0), (1, 1, 2.0), (0, 0, 1.5)]);
        assert_eq!(a.diagonal(), vec![2.5, 2.0]);
    }
}
