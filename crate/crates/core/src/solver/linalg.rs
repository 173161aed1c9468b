//! Tridiagonal LU with partial pivoting and smallest-singular-value
//! estimation.

use crate::error::{Error, Result};

/// `n×n` tridiagonal matrix: `lower[i] = A[i+1][i]`, `upper[i] = A[i][i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || lower.len() + 1 != n || upper.len() + 1 != n {
            return Err(Error::InvalidArgument(format!(
                "tridiagonal bands have lengths {}, {}, {}",
                lower.len(),
                n,
                upper.len()
            )));
        }
        Ok(Self { lower, diag, upper })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    pub fn factor(&self) -> Result<TridiagonalLu> {
        TridiagonalLu::new(self)
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.factor()?.solve(rhs)
    }
}

/// `PA = LU` in the layout of LAPACK's `gttrf`.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    ipiv: Vec<usize>,
}

impl TridiagonalLu {
    fn new(a: &Tridiagonal) -> Result<Self> {
        let n = a.len();
        let (mut dl, mut d, mut du) = (a.lower.clone(), a.diag.clone(), a.upper.clone());
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut ipiv: Vec<usize> = (0..n).collect();
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                ipiv[i] = i + 1;
            }
        }
        if let Some(k) = d.iter().position(|v| *v == 0.0 || !v.is_finite()) {
            return Err(Error::IllConditioned(format!(
                "tridiagonal matrix is singular (pivot {k})"
            )));
        }
        Ok(Self {
            dl,
            d,
            du,
            du2,
            ipiv,
        })
    }

    fn check(&self, rhs: &[f64]) -> Result<()> {
        if rhs.len() != self.d.len() {
            return Err(Error::InvalidArgument(format!(
                "right-hand side has length {}, expected {}",
                rhs.len(),
                self.d.len()
            )));
        }
        Ok(())
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.check(rhs)?;
        let n = self.d.len();
        let mut b = rhs.to_vec();
        for i in 0..n.saturating_sub(1) {
            let ip = self.ipiv[i];
            let temp = b[2 * i + 1 - ip] - self.dl[i] * b[ip];
            b[i] = b[ip];
            b[i + 1] = temp;
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
        Ok(b)
    }

    /// Solves `Aᵀx = rhs`.
    pub fn solve_transpose(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.check(rhs)?;
        let n = self.d.len();
        let mut b = rhs.to_vec();
        b[0] /= self.d[0];
        if n > 1 {
            b[1] = (b[1] - self.du[0] * b[0]) / self.d[1];
        }
        for i in 2..n {
            b[i] = (b[i] - self.du[i - 1] * b[i - 1] - self.du2[i - 2] * b[i - 2]) / self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            let ip = self.ipiv[i];
            let temp = b[i] - self.dl[i] * b[i + 1];
            b[i] = b[ip];
            b[ip] = temp;
        }
        Ok(b)
    }
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Smallest singular value by inverse iteration on `AᵀA`. Returns 0 when
/// the factorization meets an exact zero pivot.
pub fn smallest_singular_value(a: &Tridiagonal, max_iter: usize, rel_tol: f64) -> f64 {
    let Ok(lu) = a.factor() else { return 0.0 };
    let n = a.len();
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.7).sin()).collect();
    let nx = norm2(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut sigma = f64::INFINITY;
    for _ in 0..max_iter {
        let Ok(y) = lu.solve_transpose(&x) else { return 0.0 };
        let Ok(z) = lu.solve(&y) else { return 0.0 };
        let nz = norm2(&z);
        if !(nz > 0.0) || !nz.is_finite() {
            return 0.0;
        }
        let next = (1.0 / nz).sqrt();
        x = z.into_iter().map(|v| v / nz).collect();
        let done = (sigma - next).abs() <= rel_tol * next;
        sigma = next;
        if done {
            break;
        }
    }
    sigma
}
