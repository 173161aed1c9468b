use crate::error::{Error, Result};
use crate::fields::{FieldN, Point4, RationalQuadratic};

/// The extremal bubble `v(x) = (2δ/(δ² + |x − x₀|²))^{(n−2)/2}` on ℝⁿ.
///
/// Every bubble solves `Δv = −(n(n−2)/4) v^{(n+2)/(n−2)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bubble {
    pub n: usize,
    pub delta: f64,
    pub center: Vec<f64>,
}

impl Bubble {
    pub fn new(n: usize, delta: f64, center: Vec<f64>) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!("bubble needs n >= 3, got {n}")));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidArgument(format!("bubble needs δ > 0, got {delta}")));
        }
        if center.len() != n {
            return Err(Error::InvalidArgument(format!(
                "center has dimension {}, expected {n}",
                center.len()
            )));
        }
        Ok(Self { n, delta, center })
    }

    fn exponent(&self) -> f64 {
        (self.n as f64 - 2.0) / 2.0
    }

    fn offset(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let y: Vec<f64> = x.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        let rho2 = y.iter().map(|c| c * c).sum();
        (y, rho2)
    }

    /// Peak value `(2/δ)^{(n−2)/2}`, attained at the center.
    pub fn peak(&self) -> f64 {
        (2.0 / self.delta).powf(self.exponent())
    }

    /// Right-hand side of the Euler–Lagrange equation at value `v`.
    pub fn euler_lagrange_rhs(&self, v: f64) -> f64 {
        let n = self.n as f64;
        -(n * (n - 2.0) / 4.0) * v.powf((n + 2.0) / (n - 2.0))
    }

    /// Value, gradient and Laplacian in closed form.
    pub fn derivatives(&self, x: &[f64]) -> (f64, Vec<f64>, f64) {
        let m = self.exponent();
        let n = self.n as f64;
        let (y, rho2) = self.offset(x);
        let q = self.delta * self.delta + rho2;
        let v = (2.0 * self.delta / q).powf(m);
        let grad = y.iter().map(|c| -2.0 * m * v * c / q).collect();
        let lap = -2.0 * m * v * (n / q - 2.0 * (m + 1.0) * rho2 / (q * q));
        (v, grad, lap)
    }

    /// The four-dimensional bubble as an analytic [`crate::fields::ScalarField`].
    pub fn field4(&self) -> Result<RationalQuadratic> {
        if self.n != 4 {
            return Err(Error::Unsupported(format!(
                "field4 needs a 4-dimensional bubble, got n = {}",
                self.n
            )));
        }
        Ok(RationalQuadratic::bubble4(
            self.delta,
            Point4::from_column_slice(&self.center),
        ))
    }
}

impl FieldN for Bubble {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &[f64]) -> f64 {
        let (_, rho2) = self.offset(x);
        (2.0 * self.delta / (self.delta * self.delta + rho2)).powf(self.exponent())
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(self.derivatives(x).1)
    }
    fn laplacian(&self, x: &[f64]) -> Option<f64> {
        Some(self.derivatives(x).2)
    }
}
