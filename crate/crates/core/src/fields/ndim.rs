//! Fields on ℝⁿ for checks that are not tied to four dimensions.

use super::{Point4, ScalarField};
use crate::error::{Error, Result};

/// A scalar field on ℝⁿ with an optional analytic gradient and Laplacian.
pub trait FieldN: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
    fn laplacian(&self, _x: &[f64]) -> Option<f64> {
        None
    }

    /// Analytic gradient when available, central differences otherwise.
    fn gradient_or_fd(&self, x: &[f64], step: f64) -> Result<Vec<f64>> {
        check_dim(self.dim(), x)?;
        if let Some(g) = self.gradient(x) {
            return Ok(g);
        }
        let mut y = x.to_vec();
        let mut g = vec![0.0; x.len()];
        for k in 0..x.len() {
            y[k] = x[k] + step;
            let fp = self.value(&y);
            y[k] = x[k] - step;
            let fm = self.value(&y);
            y[k] = x[k];
            g[k] = (fp - fm) / (2.0 * step);
        }
        Ok(g)
    }

    /// Analytic Laplacian when available, central differences otherwise.
    fn laplacian_or_fd(&self, x: &[f64], step: f64) -> Result<f64> {
        check_dim(self.dim(), x)?;
        if let Some(l) = self.laplacian(x) {
            return Ok(l);
        }
        Ok(fd_laplacian(|y| self.value(y), x, step))
    }
}

pub(crate) fn fd_laplacian(f: impl Fn(&[f64]) -> f64, x: &[f64], step: f64) -> f64 {
    let f0 = f(x);
    let mut y = x.to_vec();
    let mut acc = 0.0;
    for k in 0..x.len() {
        y[k] = x[k] + step;
        acc += f(&y);
        y[k] = x[k] - step;
        acc += f(&y);
        y[k] = x[k];
        acc -= 2.0 * f0;
    }
    acc / (step * step)
}

fn check_dim(n: usize, x: &[f64]) -> Result<()> {
    if x.len() != n {
        return Err(Error::InvalidArgument(format!(
            "expected a point of dimension {n}, got {}",
            x.len()
        )));
    }
    if x.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain("non-finite point".into()));
    }
    Ok(())
}

/// `|x|^exponent` on ℝⁿ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPowerN {
    pub n: usize,
    pub exponent: f64,
}

impl FieldN for RadialPowerN {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &[f64]) -> f64 {
        norm(x).powf(self.exponent)
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let r = norm(x);
        let s = self.exponent * r.powf(self.exponent - 2.0);
        Some(x.iter().map(|c| c * s).collect())
    }
    fn laplacian(&self, x: &[f64]) -> Option<f64> {
        let r = norm(x);
        let a = self.exponent;
        Some(a * (a + self.n as f64 - 2.0) * r.powf(a - 2.0))
    }
}

/// Views a four-dimensional [`ScalarField`] as a [`FieldN`].
pub struct ScalarFieldAsN<'a>(pub &'a dyn ScalarField);

impl FieldN for ScalarFieldAsN<'_> {
    fn dim(&self) -> usize {
        4
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.0.value(&Point4::from_column_slice(x))
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.0
            .gradient(&Point4::from_column_slice(x))
            .map(|g| g.as_slice().to_vec())
    }
    fn laplacian(&self, x: &[f64]) -> Option<f64> {
        self.0.hessian(&Point4::from_column_slice(x)).map(|h| h.trace())
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}
