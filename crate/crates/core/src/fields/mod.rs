//! Scalar fields on ℝ⁴ and the differential operators of the flat and
//! conformally flat metrics.

mod grid;
mod library;
pub(crate) mod ndim;

pub use grid::{halton, StandardGrid};
pub use library::{
    BumpPerturbation, Constant, ExpLinear, FnField, Linear, Product, Quadratic, RadialPower,
    RationalQuadratic,
};
pub use ndim::{FieldN, RadialPowerN, ScalarFieldAsN};

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point4 = Vector4<f64>;
pub type Vec4 = Vector4<f64>;
pub type Hessian4 = Matrix4<f64>;

/// Default central-difference step for points of norm O(1).
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Evaluations closer than this to a declared singularity are rejected.
pub const SINGULAR_EXCLUSION: f64 = 1e-9;

/// An isolated singularity of a field: a point or a round sphere.
#[derive(Debug, Clone, PartialEq)]
pub enum Singularity {
    Point(Point4),
    Sphere { center: Point4, radius: f64 },
}

impl Singularity {
    pub fn distance(&self, x: &Point4) -> f64 {
        match self {
            Singularity::Point(p) => (x - p).norm(),
            Singularity::Sphere { center, radius } => ((x - center).norm() - radius).abs(),
        }
    }
}

/// A real-valued field on (a subdomain of) ℝ⁴.
///
/// Analytic derivatives are optional; operators fall back to central
/// differences when they are absent and the caller asked for fd mode.
pub trait ScalarField: Send + Sync {
    fn value(&self, x: &Point4) -> f64;

    fn gradient(&self, _x: &Point4) -> Option<Vec4> {
        None
    }

    fn hessian(&self, _x: &Point4) -> Option<Hessian4> {
        None
    }

    fn singular_set(&self) -> Vec<Singularity> {
        Vec::new()
    }

    fn describe(&self) -> String {
        "field".to_string()
    }
}

impl<T: ScalarField + ?Sized> ScalarField for Arc<T> {
    fn value(&self, x: &Point4) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &Point4) -> Option<Vec4> {
        (**self).gradient(x)
    }
    fn hessian(&self, x: &Point4) -> Option<Hessian4> {
        (**self).hessian(x)
    }
    fn singular_set(&self) -> Vec<Singularity> {
        (**self).singular_set()
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

impl<T: ScalarField + ?Sized> ScalarField for &T {
    fn value(&self, x: &Point4) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &Point4) -> Option<Vec4> {
        (**self).gradient(x)
    }
    fn hessian(&self, x: &Point4) -> Option<Hessian4> {
        (**self).hessian(x)
    }
    fn singular_set(&self) -> Vec<Singularity> {
        (**self).singular_set()
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// How derivatives are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference { step: f64 },
}

impl DerivativeMode {
    pub fn fd() -> Self {
        DerivativeMode::FiniteDifference {
            step: DEFAULT_FD_STEP,
        }
    }

    /// Analytic when the field supplies a Hessian at `x`, otherwise fd.
    pub fn auto(f: &dyn ScalarField, x: &Point4) -> Self {
        if f.hessian(x).is_some() {
            DerivativeMode::Analytic
        } else {
            DerivativeMode::fd()
        }
    }
}

/// Einstein datum `Ricci = a·g` in dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EinsteinDatum {
    pub n: u32,
    pub a: f64,
}

impl EinsteinDatum {
    pub fn new(n: u32, a: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "Einstein datum needs n >= 3, got {n}"
            )));
        }
        if !a.is_finite() {
            return Err(Error::InvalidArgument("Einstein constant must be finite".into()));
        }
        Ok(Self { n, a })
    }

    pub fn flat4() -> Self {
        Self { n: 4, a: 0.0 }
    }

    /// The unit round S⁴: Ricci = 3g, scalar curvature 12.
    pub fn unit_sphere4() -> Self {
        Self { n: 4, a: 3.0 }
    }

    pub fn scalar_curvature(&self) -> f64 {
        self.n as f64 * self.a
    }
}

/// A metric `μ² dx²` on (a subset of) ℝ⁴.
#[derive(Clone)]
pub enum ConformalMetric {
    Flat,
    /// The stereographic chart of the unit sphere, `μ = 2/(1+|x|²)`.
    Spherical,
    Conformal(Arc<dyn ScalarField>),
}

impl fmt::Debug for ConformalMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConformalMetric::Flat => write!(f, "Flat"),
            ConformalMetric::Spherical => write!(f, "Spherical"),
            ConformalMetric::Conformal(mu) => write!(f, "Conformal({})", mu.describe()),
        }
    }
}

impl ConformalMetric {
    pub fn name(&self) -> &'static str {
        match self {
            ConformalMetric::Flat => "flat",
            ConformalMetric::Spherical => "spherical",
            ConformalMetric::Conformal(_) => "conformal",
        }
    }

    pub fn factor(&self, x: &Point4) -> f64 {
        match self {
            ConformalMetric::Flat => 1.0,
            ConformalMetric::Spherical => 2.0 / (1.0 + x.norm_squared()),
            ConformalMetric::Conformal(mu) => mu.value(x),
        }
    }

    /// `∇ ln μ` at `x`.
    pub fn grad_log_factor(&self, x: &Point4) -> Result<Vec4> {
        match self {
            ConformalMetric::Flat => Ok(Vec4::zeros()),
            ConformalMetric::Spherical => Ok(x * (-2.0 / (1.0 + x.norm_squared()))),
            ConformalMetric::Conformal(mu) => {
                let m = mu.value(x);
                if !(m > 0.0) || !m.is_finite() {
                    return Err(Error::Domain(format!(
                        "metric factor must be positive, got {m}"
                    )));
                }
                let g = gradient(mu.as_ref(), x, DerivativeMode::auto(mu.as_ref(), x))?;
                Ok(g / m)
            }
        }
    }

    fn singular_set(&self) -> Vec<Singularity> {
        match self {
            ConformalMetric::Conformal(mu) => mu.singular_set(),
            _ => Vec::new(),
        }
    }
}

/// Rejects non-finite points and points within [`SINGULAR_EXCLUSION`] of a
/// declared singularity.
pub fn check_regular(f: &dyn ScalarField, x: &Point4) -> Result<()> {
    if x.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain(format!("non-finite point {:?}", x.as_slice())));
    }
    for s in f.singular_set() {
        let d = s.distance(x);
        if d < SINGULAR_EXCLUSION {
            return Err(Error::Domain(format!(
                "point {:?} lies within {d:.1e} of a singularity of {}",
                x.as_slice(),
                f.describe()
            )));
        }
    }
    Ok(())
}

fn finite_value(f: &dyn ScalarField, x: &Point4) -> Result<f64> {
    let v = f.value(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!(
            "{} is not finite at {:?}",
            f.describe(),
            x.as_slice()
        )))
    }
}

fn unit(k: usize) -> Vec4 {
    let mut e = Vec4::zeros();
    e[k] = 1.0;
    e
}

pub fn value(f: &dyn ScalarField, x: &Point4) -> Result<f64> {
    check_regular(f, x)?;
    finite_value(f, x)
}

pub fn gradient(f: &dyn ScalarField, x: &Point4, mode: DerivativeMode) -> Result<Vec4> {
    check_regular(f, x)?;
    match mode {
        DerivativeMode::Analytic => f
            .gradient(x)
            .ok_or(Error::MissingDerivative("analytic gradient not supplied")),
        DerivativeMode::FiniteDifference { step } => {
            let mut g = Vec4::zeros();
            for k in 0..4 {
                let e = unit(k) * step;
                g[k] = (finite_value(f, &(x + e))? - finite_value(f, &(x - e))?) / (2.0 * step);
            }
            Ok(g)
        }
    }
}

pub fn hessian(f: &dyn ScalarField, x: &Point4, mode: DerivativeMode) -> Result<Hessian4> {
    check_regular(f, x)?;
    match mode {
        DerivativeMode::Analytic => f
            .hessian(x)
            .ok_or(Error::MissingDerivative("analytic Hessian not supplied")),
        DerivativeMode::FiniteDifference { step } => {
            let f0 = finite_value(f, x)?;
            let mut h = Hessian4::zeros();
            for i in 0..4 {
                let ei = unit(i) * step;
                let fp = finite_value(f, &(x + ei))?;
                let fm = finite_value(f, &(x - ei))?;
                h[(i, i)] = (fp - 2.0 * f0 + fm) / (step * step);
                for j in (i + 1)..4 {
                    let ej = unit(j) * step;
                    let d = finite_value(f, &(x + ei + ej))? - finite_value(f, &(x + ei - ej))?
                        - finite_value(f, &(x - ei + ej))?
                        + finite_value(f, &(x - ei - ej))?;
                    let v = d / (4.0 * step * step);
                    h[(i, j)] = v;
                    h[(j, i)] = v;
                }
            }
            Ok(h)
        }
    }
}

/// Flat Laplacian `Δf = div grad f` (negative spectrum).
pub fn laplacian_flat(f: &dyn ScalarField, x: &Point4, mode: DerivativeMode) -> Result<f64> {
    check_regular(f, x)?;
    match mode {
        DerivativeMode::Analytic => Ok(f
            .hessian(x)
            .ok_or(Error::MissingDerivative("analytic Hessian not supplied"))?
            .trace()),
        DerivativeMode::FiniteDifference { step } => {
            let f0 = finite_value(f, x)?;
            let mut acc = 0.0;
            for k in 0..4 {
                let e = unit(k) * step;
                acc += finite_value(f, &(x + e))? - 2.0 * f0 + finite_value(f, &(x - e))?;
            }
            Ok(acc / (step * step))
        }
    }
}

/// Laplace–Beltrami operator of `g = μ² dx²` in dimension 4:
/// `Δ_g f = μ⁻² (Δf + 2⟨∇ ln μ, ∇f⟩)`.
pub fn laplace_beltrami(
    f: &dyn ScalarField,
    g: &ConformalMetric,
    x: &Point4,
    mode: DerivativeMode,
) -> Result<f64> {
    if let ConformalMetric::Flat = g {
        return laplacian_flat(f, x, mode);
    }
    for s in g.singular_set() {
        if s.distance(x) < SINGULAR_EXCLUSION {
            return Err(Error::Domain("point at a singularity of the metric".into()));
        }
    }
    let mu = g.factor(x);
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::Domain(format!("metric factor {mu} is not positive")));
    }
    let lap = laplacian_flat(f, x, mode)?;
    let grad = gradient(f, x, mode)?;
    let dlog = g.grad_log_factor(x)?;
    Ok((lap + 2.0 * dlog.dot(&grad)) / (mu * mu))
}

/// Value, gradient and Hessian of a field at one point.
#[derive(Debug, Clone, Copy)]
pub struct Jet {
    pub value: f64,
    pub gradient: Vec4,
    pub hessian: Hessian4,
}

impl Jet {
    pub fn laplacian(&self) -> f64 {
        self.hessian.trace()
    }
}

pub fn jet(f: &dyn ScalarField, x: &Point4, mode: DerivativeMode) -> Result<Jet> {
    Ok(Jet {
        value: value(f, x)?,
        gradient: gradient(f, x, mode)?,
        hessian: hessian(f, x, mode)?,
    })
}

/// Discrepancy between analytic and central-difference derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdDiscrepancy {
    pub gradient: f64,
    pub laplacian: f64,
}

impl FdDiscrepancy {
    pub fn max(&self) -> f64 {
        self.gradient.max(self.laplacian)
    }
}

pub fn fd_consistency(f: &dyn ScalarField, x: &Point4, h: f64) -> Result<FdDiscrepancy> {
    let fd = DerivativeMode::FiniteDifference { step: h };
    let ga = gradient(f, x, DerivativeMode::Analytic)?;
    let gf = gradient(f, x, fd)?;
    let la = laplacian_flat(f, x, DerivativeMode::Analytic)?;
    let lf = laplacian_flat(f, x, fd)?;
    Ok(FdDiscrepancy {
        gradient: (ga - gf).amax(),
        laplacian: (la - lf).abs(),
    })
}

/// Fourth-order central-difference gradient of a scalar function.
///
/// Used for the third derivatives in the biharmonicity residuals, where the
/// scalar itself is assembled from analytic second derivatives.
pub(crate) fn gradient_of<F>(s: F, x: &Point4, step: f64) -> Result<Vec4>
where
    F: Fn(&Point4) -> Result<f64>,
{
    let mut g = Vec4::zeros();
    for k in 0..4 {
        let e = unit(k) * step;
        let p1 = s(&(x + e))?;
        let m1 = s(&(x - e))?;
        let p2 = s(&(x + 2.0 * e))?;
        let m2 = s(&(x - 2.0 * e))?;
        g[k] = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * step);
    }
    Ok(g)
}

/// Second-order central-difference gradient of a scalar function.
pub(crate) fn gradient_of_2nd<F>(s: F, x: &Point4, step: f64) -> Result<Vec4>
where
    F: Fn(&Point4) -> Result<f64>,
{
    let mut g = Vec4::zeros();
    for k in 0..4 {
        let e = unit(k) * step;
        g[k] = (s(&(x + e))? - s(&(x - e))?) / (2.0 * step);
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(a: f64, b: f64, c: f64, d: f64) -> Point4 {
        Point4::new(a, b, c, d)
    }

    #[test]
    fn gradient_of_square_norm() {
        let f = Quadratic::new(1.0, Vec4::zeros(), 0.0, Point4::zeros());
        let g = gradient(&f, &p(1.0, 0.0, 0.0, 0.0), DerivativeMode::Analytic).unwrap();
        assert_eq!(g, p(2.0, 0.0, 0.0, 0.0));
        let g = gradient(&f, &p(1.0, 0.0, 0.0, 0.0), DerivativeMode::fd()).unwrap();
        assert_abs_diff_eq!(g[0], 2.0, epsilon = 1e-9);
    }

    #[test]
    fn gradient_of_inverse_radius() {
        let f = RadialPower::new(1.0, -1.0, Point4::zeros());
        let g = gradient(&f, &p(1.0, 0.0, 0.0, 0.0), DerivativeMode::Analytic).unwrap();
        assert_abs_diff_eq!(g[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.rows(1, 3).amax(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn bubble_center_is_critical() {
        let b = RationalQuadratic::bubble4(1.0, Point4::zeros());
        let g = gradient(&b, &Point4::zeros(), DerivativeMode::Analytic).unwrap();
        assert_eq!(g, Vec4::zeros());
    }

    #[test]
    fn laplacian_examples() {
        let f = RadialPower::new(1.0, -1.0, Point4::zeros());
        let x = p(0.0, 0.6, 0.0, 0.8);
        assert_abs_diff_eq!(
            laplacian_flat(&f, &x, DerivativeMode::Analytic).unwrap(),
            -1.0,
            epsilon = 1e-14
        );
        let alpha = 0.7;
        let f = RadialPower::new(1.0, alpha, Point4::zeros());
        let x = p(0.3, -1.2, 0.5, 2.0);
        let r = x.norm();
        assert_abs_diff_eq!(
            laplacian_flat(&f, &x, DerivativeMode::Analytic).unwrap(),
            alpha * (alpha + 2.0) * r.powf(alpha - 2.0),
            epsilon = 1e-13
        );
        let c = Constant(3.5);
        assert_eq!(laplacian_flat(&c, &x, DerivativeMode::Analytic).unwrap(), 0.0);
        assert_eq!(laplacian_flat(&c, &x, DerivativeMode::fd()).unwrap(), 0.0);
    }

    #[test]
    fn singular_points_are_rejected() {
        let f = RadialPower::new(1.0, -1.0, Point4::zeros());
        let err = gradient(&f, &Point4::zeros(), DerivativeMode::Analytic).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let err = fd_consistency(&f, &p(1e-10, 0.0, 0.0, 0.0), 1e-4).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let nan = p(f64::NAN, 0.0, 0.0, 0.0);
        assert!(value(&Constant(1.0), &nan).is_err());
    }

    #[test]
    fn missing_analytic_derivative_is_a_mode_error() {
        let f = FnField::new("x1^3", |x: &Point4| x[0].powi(3));
        let x = p(1.0, 0.0, 0.0, 0.0);
        assert!(matches!(
            gradient(&f, &x, DerivativeMode::Analytic),
            Err(Error::MissingDerivative(_))
        ));
        assert_abs_diff_eq!(
            laplacian_flat(&f, &x, DerivativeMode::fd()).unwrap(),
            6.0,
            epsilon = 1e-6
        );
    }

    #[test]
    fn flat_beltrami_is_flat_laplacian() {
        let f = RationalQuadratic::bubble4(0.7, p(0.1, 0.2, -0.3, 0.0));
        let x = p(0.4, -0.1, 0.9, 1.3);
        let a = laplace_beltrami(&f, &ConformalMetric::Flat, &x, DerivativeMode::Analytic).unwrap();
        let b = laplacian_flat(&f, &x, DerivativeMode::Analytic).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn spherical_beltrami_of_constant_and_coordinate() {
        let c = Constant(2.0);
        let x = p(0.3, 0.2, -0.4, 1.0);
        assert_eq!(
            laplace_beltrami(&c, &ConformalMetric::Spherical, &x, DerivativeMode::Analytic)
                .unwrap(),
            0.0
        );
        let x1 = Linear::coordinate(0);
        let v = laplace_beltrami(
            &x1,
            &ConformalMetric::Spherical,
            &Point4::zeros(),
            DerivativeMode::Analytic,
        )
        .unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn polynomial_fd_is_exact_to_roundoff() {
        let f = Quadratic::new(0.5, p(0.1, -0.2, 0.3, 0.0), 2.0, p(1.0, 0.0, 0.0, -1.0));
        let d = fd_consistency(&f, &p(0.3, 0.7, -1.1, 0.2), 1e-3).unwrap();
        assert!(d.max() < 1e-8, "{d:?}");
    }

    #[test]
    fn bubble_fd_discrepancy_is_small() {
        let b = RationalQuadratic::bubble4(1.0, Point4::zeros());
        let d = fd_consistency(&b, &p(0.3, 0.0, 0.0, 0.0), 1e-3).unwrap();
        assert!(d.max() < 1e-5, "{d:?}");
    }

    #[test]
    fn einstein_datum_curvature() {
        assert_eq!(EinsteinDatum::unit_sphere4().scalar_curvature(), 12.0);
        assert_eq!(EinsteinDatum::new(5, -2.0).unwrap().scalar_curvature(), -10.0);
        assert!(EinsteinDatum::new(2, 1.0).is_err());
    }
}
