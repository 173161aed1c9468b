//! Residual equations behind one trait, registered by name so the verifier
//! can pick them at run time.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::report::{EquationKind, PointResidual, ResidualReport};
use crate::error::{Error, Result};
use crate::fields::{ConformalMetric, EinsteinDatum, Point4, ScalarField, StandardGrid};

/// Codomain scalar curvature: a constant, or the pointwise value forced by
/// `6A + 2a/λ² + R_h = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CodomainCurvature {
    Constant(f64),
    FromConstants { big_a: f64, a: f64 },
}

impl CodomainCurvature {
    pub fn at(&self, lambda_value: f64) -> Result<f64> {
        match *self {
            CodomainCurvature::Constant(r) => Ok(r),
            CodomainCurvature::FromConstants { big_a, a } => {
                super::codomain_scalar_curvature(big_a, a, lambda_value)
            }
        }
    }
}

/// Everything an equation needs besides the field and the point.
#[derive(Debug, Clone)]
pub struct EquationContext {
    pub metric: ConformalMetric,
    pub datum: EinsteinDatum,
    /// The constant `A` of `Δλ − aλ = Aλ³`.
    pub big_a: f64,
    pub codomain_curvature: CodomainCurvature,
}

impl EquationContext {
    pub fn flat(a: f64, big_a: f64) -> Self {
        Self {
            metric: ConformalMetric::Flat,
            datum: EinsteinDatum { n: 4, a },
            big_a,
            codomain_curvature: CodomainCurvature::FromConstants { big_a, a },
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let mut p = BTreeMap::new();
        p.insert("n".into(), self.datum.n as f64);
        p.insert("a".into(), self.datum.a);
        p.insert("A".into(), self.big_a);
        if let CodomainCurvature::Constant(r) = self.codomain_curvature {
            p.insert("R_h".into(), r);
        }
        p
    }
}

/// A scalar residual magnitude evaluated pointwise.
pub trait ResidualEquation: Send + Sync {
    fn kind(&self) -> EquationKind;

    fn magnitude(
        &self,
        field: &dyn ScalarField,
        ctx: &EquationContext,
        x: &Point4,
    ) -> Result<f64>;
}

struct Bfo;
struct Sf;
struct Eq4d;
struct CurvatureLaw;
struct Isoparametric;

impl ResidualEquation for Bfo {
    fn kind(&self) -> EquationKind {
        EquationKind::Bfo
    }
    fn magnitude(&self, f: &dyn ScalarField, ctx: &EquationContext, x: &Point4) -> Result<f64> {
        Ok(super::bfo_residual_on(f, &ctx.metric, &ctx.datum, x)?.norm())
    }
}

impl ResidualEquation for Sf {
    fn kind(&self) -> EquationKind {
        EquationKind::Sf
    }
    fn magnitude(&self, f: &dyn ScalarField, ctx: &EquationContext, x: &Point4) -> Result<f64> {
        if !matches!(ctx.metric, ConformalMetric::Flat) {
            return Err(Error::Unsupported("sf residual is implemented on flat domains".into()));
        }
        Ok(super::sf_residual(f, &ctx.datum, x)?.norm())
    }
}

impl ResidualEquation for Eq4d {
    fn kind(&self) -> EquationKind {
        EquationKind::Eq4d
    }
    fn magnitude(&self, f: &dyn ScalarField, ctx: &EquationContext, x: &Point4) -> Result<f64> {
        if ctx.datum.n != 4 {
            return Err(Error::Unsupported("eq4d is the n = 4 reduction".into()));
        }
        Ok(super::eq4d_residual_on(f, &ctx.metric, ctx.datum.a, ctx.big_a, x)?.abs())
    }
}

impl ResidualEquation for CurvatureLaw {
    fn kind(&self) -> EquationKind {
        EquationKind::CurvatureLaw
    }
    fn magnitude(&self, f: &dyn ScalarField, ctx: &EquationContext, x: &Point4) -> Result<f64> {
        if !matches!(ctx.metric, ConformalMetric::Flat) {
            return Err(Error::Unsupported(
                "curvature law residual is implemented on flat domains".into(),
            ));
        }
        Ok(super::curvature_law_residual(
            f,
            ctx.datum.n,
            ctx.datum.scalar_curvature(),
            &ctx.codomain_curvature,
            x,
        )?
        .abs())
    }
}

impl ResidualEquation for Isoparametric {
    fn kind(&self) -> EquationKind {
        EquationKind::Isoparametric
    }
    fn magnitude(&self, _f: &dyn ScalarField, _ctx: &EquationContext, _x: &Point4) -> Result<f64> {
        Err(Error::Unsupported(
            "the isoparametric check needs an n != 4 field and a profile u; \
             call residuals::isoparametric_residuals directly"
                .into(),
        ))
    }
}

/// Name-indexed collection of residual equations.
pub struct EquationRegistry {
    equations: BTreeMap<&'static str, Arc<dyn ResidualEquation>>,
}

impl EquationRegistry {
    pub fn empty() -> Self {
        Self {
            equations: BTreeMap::new(),
        }
    }

    /// All built-in equations.
    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(Bfo));
        r.register(Arc::new(Sf));
        r.register(Arc::new(Eq4d));
        r.register(Arc::new(CurvatureLaw));
        r.register(Arc::new(Isoparametric));
        r
    }

    pub fn register(&mut self, eq: Arc<dyn ResidualEquation>) {
        self.equations.insert(eq.kind().name(), eq);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn ResidualEquation>> {
        let key = name.replace('-', "_");
        self.equations
            .get(key.as_str())
            .cloned()
            .ok_or_else(|| Error::InvalidArgument(format!("unknown equation '{name}'")))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.equations.keys().copied().collect()
    }
}

/// Evaluates `eq` over every grid point. Points are processed in parallel;
/// the report keeps grid order.
pub fn evaluate_grid(
    eq: &dyn ResidualEquation,
    field: &dyn ScalarField,
    ctx: &EquationContext,
    grid: &StandardGrid,
) -> ResidualReport {
    let points: Vec<PointResidual> = grid
        .points
        .par_iter()
        .map(|x| {
            let coords = [x[0], x[1], x[2], x[3]];
            match eq.magnitude(field, ctx, x) {
                Ok(v) if v.is_finite() => PointResidual {
                    point: coords,
                    value: Some(v),
                    error: None,
                },
                Ok(v) => PointResidual {
                    point: coords,
                    value: None,
                    error: Some(format!("non-finite residual {v}")),
                },
                Err(e) => PointResidual {
                    point: coords,
                    value: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    ResidualReport::from_points(
        eq.kind(),
        field.describe(),
        ctx.metric.name().to_string(),
        ctx.params(),
        grid.clone(),
        points,
    )
}
