//! Pointwise residuals of the biharmonicity equations for conformal maps.
//!
//! All operators take the conformal factor `λ` (with `φ*h = λ²g`) as a
//! [`ScalarField`]. Vector residuals are returned as coordinate components of
//! a vector field on the domain.

mod registry;
mod report;

pub use registry::{
    evaluate_grid, CodomainCurvature, EquationContext, EquationRegistry, ResidualEquation,
};
pub use report::{EquationKind, PointResidual, ResidualReport};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{
    self, gradient_of, gradient_of_2nd, ConformalMetric, DerivativeMode, EinsteinDatum, FieldN,
    Jet, Point4, ScalarField, Vec4,
};

/// Step of the fourth-order stencil that differentiates analytically
/// assembled second-order quantities.
pub const THIRD_ORDER_STEP: f64 = 1e-4;
/// Step of the nested pure-fd fallback.
pub const PURE_FD_STEP: f64 = 1e-3;
/// Default tolerance when analytic Hessians are available.
pub const ANALYTIC_TOLERANCE: f64 = 1e-6;
/// Default tolerance for the nested finite-difference fallback.
pub const PURE_FD_TOLERANCE: f64 = 1e-4;

/// Which derivative route a residual used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualRoute {
    AnalyticAssisted,
    PureFd,
}

impl ResidualRoute {
    pub fn for_field(f: &dyn ScalarField, x: &Point4) -> Self {
        if f.hessian(x).is_some() {
            ResidualRoute::AnalyticAssisted
        } else {
            ResidualRoute::PureFd
        }
    }

    pub fn tolerance(self) -> f64 {
        match self {
            ResidualRoute::AnalyticAssisted => ANALYTIC_TOLERANCE,
            ResidualRoute::PureFd => PURE_FD_TOLERANCE,
        }
    }

    fn inner_mode(self) -> DerivativeMode {
        match self {
            ResidualRoute::AnalyticAssisted => DerivativeMode::Analytic,
            ResidualRoute::PureFd => DerivativeMode::FiniteDifference {
                step: PURE_FD_STEP,
            },
        }
    }
}

fn positive_jet(lambda: &dyn ScalarField, x: &Point4, mode: DerivativeMode) -> Result<Jet> {
    let j = fields::jet(lambda, x, mode)?;
    if !(j.value > 0.0) {
        return Err(Error::Domain(format!(
            "conformal factor must be positive, got {} at {:?}",
            j.value,
            x.as_slice()
        )));
    }
    Ok(j)
}

/// `Δ_g ln λ` and `|grad ln λ|²_g` for `g = μ²dx²` (n = 4 when curved).
fn log_factor_scalars(
    lambda: &dyn ScalarField,
    metric: &ConformalMetric,
    x: &Point4,
    mode: DerivativeMode,
) -> Result<(f64, f64, Vec4)> {
    let j = positive_jet(lambda, x, mode)?;
    let dlog = j.gradient / j.value;
    let lap_log = j.laplacian() / j.value - dlog.norm_squared();
    match metric {
        ConformalMetric::Flat => Ok((lap_log, dlog.norm_squared(), dlog)),
        _ => {
            let mu = metric.factor(x);
            let dmu = metric.grad_log_factor(x)?;
            let inv = 1.0 / (mu * mu);
            Ok((
                inv * (lap_log + 2.0 * dmu.dot(&dlog)),
                inv * dlog.norm_squared(),
                dlog,
            ))
        }
    }
}

fn check_metric_dimension(metric: &ConformalMetric, datum: &EinsteinDatum) -> Result<()> {
    if !matches!(metric, ConformalMetric::Flat) && datum.n != 4 {
        return Err(Error::Unsupported(
            "curved-metric operators are only available in dimension 4".into(),
        ));
    }
    Ok(())
}

/// Biharmonicity residual of a conformal map from an Einstein domain:
///
/// `grad(Δ ln λ) − {2Δ ln λ + (n−2)|grad ln λ|²} grad ln λ + 2a grad ln λ
///  + ((6−n)/2) grad |grad ln λ|²`
///
/// on the flat domain. Vanishes exactly where the map is biharmonic.
pub fn bfo_residual(lambda: &dyn ScalarField, datum: &EinsteinDatum, x: &Point4) -> Result<Vec4> {
    bfo_residual_on(lambda, &ConformalMetric::Flat, datum, x)
}

/// [`bfo_residual`] on a domain carrying the conformally flat metric `g`.
pub fn bfo_residual_on(
    lambda: &dyn ScalarField,
    metric: &ConformalMetric,
    datum: &EinsteinDatum,
    x: &Point4,
) -> Result<Vec4> {
    let route = ResidualRoute::for_field(lambda, x);
    bfo_residual_with(lambda, metric, datum, x, route)
}

pub fn bfo_residual_with(
    lambda: &dyn ScalarField,
    metric: &ConformalMetric,
    datum: &EinsteinDatum,
    x: &Point4,
    route: ResidualRoute,
) -> Result<Vec4> {
    check_metric_dimension(metric, datum)?;
    let mode = route.inner_mode();
    let n = datum.n as f64;
    let (lap_log, grad_sq, dlog) = log_factor_scalars(lambda, metric, x, mode)?;
    let (d_lap, d_grad_sq) = match route {
        ResidualRoute::AnalyticAssisted => (
            gradient_of(
                |y| Ok(log_factor_scalars(lambda, metric, y, mode)?.0),
                x,
                THIRD_ORDER_STEP,
            )?,
            gradient_of(
                |y| Ok(log_factor_scalars(lambda, metric, y, mode)?.1),
                x,
                THIRD_ORDER_STEP,
            )?,
        ),
        ResidualRoute::PureFd => (
            gradient_of_2nd(
                |y| Ok(log_factor_scalars(lambda, metric, y, mode)?.0),
                x,
                PURE_FD_STEP,
            )?,
            gradient_of_2nd(
                |y| Ok(log_factor_scalars(lambda, metric, y, mode)?.1),
                x,
                PURE_FD_STEP,
            )?,
        ),
    };
    let covector = d_lap - dlog * (2.0 * lap_log + (n - 2.0) * grad_sq) + dlog * (2.0 * datum.a)
        + d_grad_sq * ((6.0 - n) / 2.0);
    let mu = metric.factor(x);
    Ok(covector / (mu * mu))
}

/// The Einstein-specialized form
/// `grad(λΔλ + aλ² − ((n−4)/2)|∇λ|²) − 4(Δλ)∇λ` on the flat domain.
pub fn sf_residual(lambda: &dyn ScalarField, datum: &EinsteinDatum, x: &Point4) -> Result<Vec4> {
    let route = ResidualRoute::for_field(lambda, x);
    let mode = route.inner_mode();
    let n = datum.n as f64;
    let potential = |y: &Point4| -> Result<f64> {
        let j = positive_jet(lambda, y, mode)?;
        Ok(j.value * j.laplacian() + datum.a * j.value * j.value
            - 0.5 * (n - 4.0) * j.gradient.norm_squared())
    };
    let j = positive_jet(lambda, x, mode)?;
    let dp = match route {
        ResidualRoute::AnalyticAssisted => gradient_of(potential, x, THIRD_ORDER_STEP)?,
        ResidualRoute::PureFd => gradient_of_2nd(potential, x, PURE_FD_STEP)?,
    };
    Ok(dp - j.gradient * (4.0 * j.laplacian()))
}

/// `Δλ − aλ − Aλ³` on the flat domain.
pub fn eq4d_residual(lambda: &dyn ScalarField, a: f64, big_a: f64, x: &Point4) -> Result<f64> {
    eq4d_residual_on(lambda, &ConformalMetric::Flat, a, big_a, x)
}

/// `Δ_g λ − aλ − Aλ³` for a conformally flat domain metric.
pub fn eq4d_residual_on(
    lambda: &dyn ScalarField,
    metric: &ConformalMetric,
    a: f64,
    big_a: f64,
    x: &Point4,
) -> Result<f64> {
    let mode = DerivativeMode::auto(lambda, x);
    let v = fields::value(lambda, x)?;
    if !(v > 0.0) {
        return Err(Error::Domain(format!("conformal factor must be positive, got {v}")));
    }
    let lap = fields::laplace_beltrami(lambda, metric, x, mode)?;
    Ok(lap - a * v - big_a * v * v * v)
}

/// Least-squares estimate of the constant `A` in `Δλ − aλ = Aλ³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantA {
    pub value: f64,
    /// RMS of `Δλ − aλ − Aλ³` over the samples at the fitted `A`.
    pub fit_residual: f64,
}

pub fn estimate_a(lambda: &dyn ScalarField, a: f64, samples: &[Point4]) -> Result<ConstantA> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "estimating A needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let mut rows = Vec::with_capacity(samples.len());
    for x in samples {
        let mode = DerivativeMode::auto(lambda, x);
        let v = fields::value(lambda, x)?;
        let lap = fields::laplacian_flat(lambda, x, mode)?;
        rows.push((lap - a * v, v * v * v));
    }
    let cc: f64 = rows.iter().map(|(_, c)| c * c).sum();
    let scale = rows.iter().map(|(_, c)| c.abs()).fold(0.0, f64::max);
    if scale < 1e-12 || cc == 0.0 {
        return Err(Error::IllConditioned(
            "λ³ vanishes at every sample; A is not determined".into(),
        ));
    }
    let value = rows.iter().map(|(r, c)| r * c).sum::<f64>() / cc;
    let ss: f64 = rows.iter().map(|(r, c)| (r - value * c).powi(2)).sum();
    Ok(ConstantA {
        value,
        fit_residual: (ss / rows.len() as f64).sqrt(),
    })
}

/// Scalar curvature of the codomain forced by `6A + 2a/λ² + R_h = 0`.
pub fn codomain_scalar_curvature(big_a: f64, a: f64, lambda_value: f64) -> Result<f64> {
    if !(lambda_value > 0.0) {
        return Err(Error::Domain(format!(
            "conformal factor value must be positive, got {lambda_value}"
        )));
    }
    Ok(-6.0 * big_a - 2.0 * a / (lambda_value * lambda_value))
}

/// Residual of the conformal scalar-curvature law
/// `2(n−1)Δλ = λR_g − λ³R_h − ((n−1)(n−4)/λ)|∇λ|²` on the flat domain.
pub fn curvature_law_residual(
    lambda: &dyn ScalarField,
    n: u32,
    r_g: f64,
    r_h: &CodomainCurvature,
    x: &Point4,
) -> Result<f64> {
    let mode = DerivativeMode::auto(lambda, x);
    let j = positive_jet(lambda, x, mode)?;
    let n = n as f64;
    let rh = r_h.at(j.value)?;
    Ok(2.0 * (n - 1.0) * j.laplacian() - j.value * r_g + j.value.powi(3) * rh
        + (n - 1.0) * (n - 4.0) / j.value * j.gradient.norm_squared())
}

/// Codomain norm of the tension field `τ(φ) = −(n−2) dφ(grad ln λ)`:
/// `(n−2) λ |grad ln λ|_g`.
pub fn tension_norm(lambda: &dyn ScalarField, n: u32, x: &Point4) -> Result<f64> {
    tension_norm_on(lambda, &ConformalMetric::Flat, n, x)
}

pub fn tension_norm_on(
    lambda: &dyn ScalarField,
    metric: &ConformalMetric,
    n: u32,
    x: &Point4,
) -> Result<f64> {
    let v = fields::value(lambda, x)?;
    if !(v > 0.0) {
        return Err(Error::Domain(format!("conformal factor must be positive, got {v}")));
    }
    if n == 2 {
        return Ok(0.0);
    }
    let g = fields::gradient(lambda, x, DerivativeMode::auto(lambda, x))?;
    Ok((n as f64 - 2.0) * g.norm() / metric.factor(x))
}

/// Aubin's sufficient condition `k < (n−2)/(4(n−1)) R_g` for a positive
/// solution of `−Δu + ku = u^{(n+2)/(n−2)}`.
pub fn aubin_condition(k: f64, datum: &EinsteinDatum) -> Result<bool> {
    if datum.n < 4 {
        return Err(Error::Unsupported(format!(
            "the Aubin condition needs n >= 4, got {}",
            datum.n
        )));
    }
    let n = datum.n as f64;
    Ok(k < (n - 2.0) / (4.0 * (n - 1.0)) * datum.scalar_curvature())
}

/// A profile function `u(s)` with derivative, for the isoparametric check.
pub trait Profile {
    fn value(&self, s: f64) -> f64;
    fn derivative(&self, s: f64) -> f64;
}

impl<F: Fn(f64) -> f64, G: Fn(f64) -> f64> Profile for (F, G) {
    fn value(&self, s: f64) -> f64 {
        (self.0)(s)
    }
    fn derivative(&self, s: f64) -> f64 {
        (self.1)(s)
    }
}

/// The pair `(Δλ − u′(λ), |∇λ|² − (2/(n−4))(λu′(λ) − 4u(λ) + aλ²))` for
/// `n ≠ 4`, both zero iff `λ` is a biharmonic conformal factor with profile `u`.
pub fn isoparametric_residuals(
    lambda: &dyn FieldN,
    a: f64,
    u: &dyn Profile,
    x: &[f64],
) -> Result<(f64, f64)> {
    let n = lambda.dim();
    if n == 4 {
        return Err(Error::Unsupported(
            "the isoparametric reduction applies only for n != 4".into(),
        ));
    }
    if n < 3 {
        return Err(Error::InvalidArgument(format!("dimension must be >= 3, got {n}")));
    }
    let v = lambda.value(x);
    let lap = lambda.laplacian_or_fd(x, fields::DEFAULT_FD_STEP)?;
    let g2: f64 = lambda
        .gradient_or_fd(x, fields::DEFAULT_FD_STEP)?
        .iter()
        .map(|c| c * c)
        .sum();
    let du = u.derivative(v);
    Ok((
        lap - du,
        g2 - 2.0 / (n as f64 - 4.0) * (v * du - 4.0 * u.value(v) + a * v * v),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Constant, ExpLinear, RadialPower, RadialPowerN, RationalQuadratic};
    use approx::assert_abs_diff_eq;

    fn e1(t: f64) -> Point4 {
        Point4::new(t, 0.0, 0.0, 0.0)
    }

    #[test]
    fn bfo_vanishes_for_inverse_radius_and_bubble() {
        let flat = EinsteinDatum::flat4();
        let inv = RadialPower::new(1.0, -1.0, Point4::zeros());
        assert!(bfo_residual(&inv, &flat, &e1(1.0)).unwrap().amax() < 1e-6);
        let b = RationalQuadratic::bubble4(1.0, Point4::zeros());
        assert!(bfo_residual(&b, &flat, &e1(0.5)).unwrap().amax() < 1e-6);
    }

    #[test]
    fn bfo_pure_fd_route_is_looser_but_zero() {
        let b = crate::fields::FnField::new("bubble", |x: &Point4| 2.0 / (1.0 + x.norm_squared()));
        let r = bfo_residual(&b, &EinsteinDatum::flat4(), &e1(0.5)).unwrap();
        assert!(r.amax() < PURE_FD_TOLERANCE, "{r:?}");
    }

    #[test]
    fn constant_factor_residuals_vanish_exactly() {
        let c = Constant(2.5);
        let d = EinsteinDatum::new(4, 1.7).unwrap();
        let x = Point4::new(0.2, 0.4, -0.1, 3.0);
        assert_eq!(bfo_residual(&c, &d, &x).unwrap(), Vec4::zeros());
        assert_eq!(sf_residual(&c, &EinsteinDatum::flat4(), &x).unwrap(), Vec4::zeros());
        assert_eq!(tension_norm(&c, 4, &x).unwrap(), 0.0);
    }

    #[test]
    fn sf_examples() {
        let flat = EinsteinDatum::flat4();
        let s = RationalQuadratic::identity_into_space_form(1.0);
        assert!(sf_residual(&s, &flat, &e1(1.0)).unwrap().amax() < 1e-6);
        let p = RadialPower::new(1.0, -0.5, Point4::zeros());
        assert!(sf_residual(&p, &flat, &e1(1.0)).unwrap().norm() > 1e-2);
    }

    #[test]
    fn eq4d_examples() {
        let inv = RadialPower::new(1.0, -1.0, Point4::zeros());
        assert_abs_diff_eq!(eq4d_residual(&inv, 0.0, -1.0, &e1(2.0)).unwrap(), 0.0, epsilon = 1e-15);
        for eps in [-1.0, 1.0] {
            let f = RationalQuadratic::identity_into_space_form(eps);
            let x = Point4::new(0.3, -0.2, 0.4, 0.1);
            assert_abs_diff_eq!(
                eq4d_residual(&f, 0.0, -2.0 * eps, &x).unwrap(),
                0.0,
                epsilon = 1e-12
            );
        }
        // |x|^α solves Δλ = Aλ³ only for α = −1.
        let x = Point4::new(0.7, 0.1, -0.4, 0.9);
        for alpha in [-1.5, -0.5, 0.5] {
            let f = RadialPower::new(1.0, alpha, Point4::zeros());
            let a = estimate_a(&f, 0.0, &[x, x * 2.0, x * 0.5]).unwrap();
            assert!(a.fit_residual > 1e-3, "alpha {alpha}: {a:?}");
        }
    }

    #[test]
    fn estimate_a_examples() {
        let samples: Vec<Point4> = (1..=10)
            .map(|k| {
                let t = k as f64;
                Point4::new((0.7 * t).sin(), (1.3 * t).cos(), 0.2 * t - 1.0, (0.4 * t).sin())
            })
            .collect();
        let b = RationalQuadratic::bubble4(1.0, Point4::zeros());
        let fit = estimate_a(&b, 0.0, &samples).unwrap();
        assert_abs_diff_eq!(fit.value, -2.0, epsilon = 1e-10);
        assert!(fit.fit_residual < 1e-8);

        let h = RadialPower::new(1.0, -2.0, Point4::zeros());
        let fit = estimate_a(&h, 0.0, &samples).unwrap();
        assert_abs_diff_eq!(fit.value, 0.0, epsilon = 1e-10);
        assert!(fit.fit_residual < 1e-8);

        let e = ExpLinear {
            k: Vec4::new(1.0, 0.0, 0.0, 0.0),
        };
        // Δλ/λ³ = e^{−2x₁} differs between two points, so no constant A fits.
        let ratio = |t: f64| (-2.0 * t).exp();
        assert!((ratio(0.0) - ratio(1.0)).abs() > 0.5);
        let fit = estimate_a(&e, 0.0, &samples).unwrap();
        assert!(fit.fit_residual > 1e-2, "{fit:?}");
    }

    #[test]
    fn estimate_a_rejects_degenerate_input() {
        let b = RationalQuadratic::bubble4(1.0, Point4::zeros());
        assert!(matches!(
            estimate_a(&b, 0.0, &[e1(1.0)]),
            Err(Error::InvalidArgument(_))
        ));
        let z = Constant(0.0);
        assert!(matches!(
            estimate_a(&z, 0.0, &[e1(1.0), e1(2.0)]),
            Err(Error::IllConditioned(_))
        ));
    }

    #[test]
    fn codomain_curvature_formulas() {
        for lam in [0.3, 1.0, 2.7] {
            for eps in [-1.0, 1.0] {
                assert_eq!(codomain_scalar_curvature(-2.0 * eps, 0.0, lam).unwrap(), 12.0 * eps);
            }
            assert_eq!(
                codomain_scalar_curvature(-1.0, 3.0, lam).unwrap(),
                6.0 - 6.0 / (lam * lam)
            );
            assert_eq!(
                codomain_scalar_curvature(-1.0, -3.0, lam).unwrap(),
                6.0 + 6.0 / (lam * lam)
            );
        }
        assert!(codomain_scalar_curvature(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn curvature_law_examples() {
        let s = RationalQuadratic::identity_into_space_form(1.0);
        let x = Point4::new(0.4, 1.1, -0.3, 0.2);
        let r = curvature_law_residual(&s, 4, 0.0, &CodomainCurvature::Constant(12.0), &x).unwrap();
        assert_abs_diff_eq!(r, 0.0, epsilon = 1e-12);

        let c = Constant(1.7);
        let a = 0.8;
        let r = curvature_law_residual(
            &c,
            4,
            4.0 * a,
            &CodomainCurvature::Constant(4.0 * a / (1.7 * 1.7)),
            &x,
        )
        .unwrap();
        assert_abs_diff_eq!(r, 0.0, epsilon = 1e-12);

        // 1/|x|: R_h from A = −1, a = 0 is 6, and only 6 balances the law.
        let inv = RadialPower::new(1.0, -1.0, Point4::zeros());
        let rh = codomain_scalar_curvature(-1.0, 0.0, 1.0).unwrap();
        assert_eq!(rh, 6.0);
        let ok = curvature_law_residual(&inv, 4, 0.0, &CodomainCurvature::Constant(rh), &x).unwrap();
        assert_abs_diff_eq!(ok, 0.0, epsilon = 1e-12);
        let bad =
            curvature_law_residual(&inv, 4, 0.0, &CodomainCurvature::Constant(-6.0), &x).unwrap();
        assert!(bad.abs() > 1e-1);
    }

    #[test]
    fn tension_examples() {
        let inv = RadialPower::new(1.0, -1.0, Point4::zeros());
        assert_abs_diff_eq!(
            tension_norm(&inv, 4, &Point4::new(0.0, 0.6, 0.8, 0.0)).unwrap(),
            2.0,
            epsilon = 1e-14
        );
        assert_eq!(tension_norm(&inv, 2, &e1(0.5)).unwrap(), 0.0);
    }

    #[test]
    fn aubin_examples() {
        assert!(aubin_condition(-3.0, &EinsteinDatum::new(4, -3.0).unwrap()).unwrap());
        assert!(!aubin_condition(3.0, &EinsteinDatum::new(4, 3.0).unwrap()).unwrap());
        assert!(!aubin_condition(0.0, &EinsteinDatum::new(4, 0.0).unwrap()).unwrap());
        assert!(matches!(
            aubin_condition(0.0, &EinsteinDatum::new(3, -1.0).unwrap()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn isoparametric_examples() {
        // Constant λ = c with u′(c) = 0 and 4u(c) = ac².
        struct Const;
        impl FieldN for Const {
            fn dim(&self) -> usize {
                5
            }
            fn value(&self, _x: &[f64]) -> f64 {
                2.0
            }
            fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
                Some(vec![0.0; x.len()])
            }
            fn laplacian(&self, _x: &[f64]) -> Option<f64> {
                Some(0.0)
            }
        }
        let a = 1.5;
        let u_flat = (move |_s: f64| a * 4.0 / 4.0, |_s: f64| 0.0);
        let (r1, r2) = isoparametric_residuals(&Const, a, &u_flat, &[0.1; 5]).unwrap();
        assert_eq!((r1, r2), (0.0, 0.0));

        // n = 3 bubble-like field with a mismatched profile.
        let b = crate::families::Bubble::new(3, 1.0, vec![0.0; 3]).unwrap();
        let wrong = (|s: f64| s, |_s: f64| 1.0);
        let (r1, r2) = isoparametric_residuals(&b, 0.0, &wrong, &[0.3, 0.2, 0.1]).unwrap();
        assert!(r1.abs() > 1e-2 || r2.abs() > 1e-2);

        // n = 6, λ = |x|: Δ|x| = 5/|x| forces u′ = 5/s, u = 5 ln s + C.
        let r = RadialPowerN { n: 6, exponent: 1.0 };
        let cst = 0.3;
        let u = (move |s: f64| 5.0 * s.ln() + cst, |s: f64| 5.0 / s);
        let x = [0.5, -0.2, 0.3, 0.1, 0.4, 0.2];
        let lam = crate::fields::FieldN::value(&r, &x);
        let (r1, r2) = isoparametric_residuals(&r, 0.0, &u, &x).unwrap();
        assert_abs_diff_eq!(r1, 0.0, epsilon = 1e-12);
        let expected = 1.0 - (5.0 - 20.0 * lam.ln() - 4.0 * cst);
        assert_abs_diff_eq!(r2, expected, epsilon = 1e-12);
        assert!(r2.abs() > 1e-3);

        let r4 = RadialPowerN { n: 4, exponent: 1.0 };
        assert!(matches!(
            isoparametric_residuals(&r4, 0.0, &u, &[1.0; 4]),
            Err(Error::Unsupported(_))
        ));
    }
}
