use std::sync::Arc;

use super::{Hessian4, Point4, ScalarField, Singularity, Vec4};

/// A constant field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl ScalarField for Constant {
    fn value(&self, _x: &Point4) -> f64 {
        self.0
    }
    fn gradient(&self, _x: &Point4) -> Option<Vec4> {
        Some(Vec4::zeros())
    }
    fn hessian(&self, _x: &Point4) -> Option<Hessian4> {
        Some(Hessian4::zeros())
    }
    fn describe(&self) -> String {
        format!("{}", self.0)
    }
}

/// `⟨c, x⟩ + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linear {
    pub coefficients: Vec4,
    pub offset: f64,
}

impl Linear {
    pub fn coordinate(k: usize) -> Self {
        let mut c = Vec4::zeros();
        c[k] = 1.0;
        Self {
            coefficients: c,
            offset: 0.0,
        }
    }
}

impl ScalarField for Linear {
    fn value(&self, x: &Point4) -> f64 {
        self.coefficients.dot(x) + self.offset
    }
    fn gradient(&self, _x: &Point4) -> Option<Vec4> {
        Some(self.coefficients)
    }
    fn hessian(&self, _x: &Point4) -> Option<Hessian4> {
        Some(Hessian4::zeros())
    }
    fn describe(&self) -> String {
        "linear".into()
    }
}

/// `p|y|² + 2⟨w, y⟩ + c` with `y = x − center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic {
    pub p: f64,
    pub w: Vec4,
    pub c: f64,
    pub center: Point4,
}

impl Quadratic {
    pub fn new(p: f64, w: Vec4, c: f64, center: Point4) -> Self {
        Self { p, w, c, center }
    }

    /// `(1 + |x|²)/2`, the reciprocal of the stereographic sphere factor.
    pub fn half_one_plus_square() -> Self {
        Self::new(0.5, Vec4::zeros(), 0.5, Point4::zeros())
    }

    fn eval(&self, x: &Point4) -> (f64, Vec4) {
        let y = x - self.center;
        (
            self.p * y.norm_squared() + 2.0 * self.w.dot(&y) + self.c,
            y * (2.0 * self.p) + self.w * 2.0,
        )
    }

    /// The zero set when it is a round sphere.
    fn zero_sphere(&self) -> Option<Singularity> {
        if self.p == 0.0 {
            return None;
        }
        let r2 = self.w.norm_squared() / (self.p * self.p) - self.c / self.p;
        (r2 >= 0.0).then(|| {
            let center = self.center - self.w / self.p;
            if r2 == 0.0 {
                Singularity::Point(center)
            } else {
                Singularity::Sphere {
                    center,
                    radius: r2.sqrt(),
                }
            }
        })
    }
}

impl ScalarField for Quadratic {
    fn value(&self, x: &Point4) -> f64 {
        self.eval(x).0
    }
    fn gradient(&self, x: &Point4) -> Option<Vec4> {
        Some(self.eval(x).1)
    }
    fn hessian(&self, _x: &Point4) -> Option<Hessian4> {
        Some(Hessian4::identity() * (2.0 * self.p))
    }
    fn describe(&self) -> String {
        format!("{}|y|^2 + 2<w,y> + {}", self.p, self.c)
    }
}

/// `numerator / q(x)` for a [`Quadratic`] `q`.
///
/// Covers the four-dimensional bubbles `2δ/(δ² + |x − x₀|²)`, the
/// sphere and Poincaré-ball factors `2/(1 ± |x|²)` and the flat-to-sphere
/// Möbius factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalQuadratic {
    pub numerator: f64,
    pub denominator: Quadratic,
}

impl RationalQuadratic {
    pub fn new(numerator: f64, denominator: Quadratic) -> Self {
        Self {
            numerator,
            denominator,
        }
    }

    pub fn bubble4(delta: f64, center: Point4) -> Self {
        Self::new(
            2.0 * delta,
            Quadratic::new(1.0, Vec4::zeros(), delta * delta, center),
        )
    }

    /// `2/(1 + ε|x|²)`.
    pub fn identity_into_space_form(eps: f64) -> Self {
        Self::new(2.0, Quadratic::new(eps, Vec4::zeros(), 1.0, Point4::zeros()))
    }
}

impl ScalarField for RationalQuadratic {
    fn value(&self, x: &Point4) -> f64 {
        self.numerator / self.denominator.value(x)
    }
    fn gradient(&self, x: &Point4) -> Option<Vec4> {
        let (q, dq) = self.denominator.eval(x);
        Some(dq * (-self.numerator / (q * q)))
    }
    fn hessian(&self, x: &Point4) -> Option<Hessian4> {
        let (q, dq) = self.denominator.eval(x);
        let hq = 2.0 * self.denominator.p;
        let outer = dq * dq.transpose();
        Some(
            outer * (2.0 * self.numerator / (q * q * q))
                - Hessian4::identity() * (self.numerator * hq / (q * q)),
        )
    }
    fn singular_set(&self) -> Vec<Singularity> {
        self.denominator.zero_sphere().into_iter().collect()
    }
    fn describe(&self) -> String {
        format!("{} / ({})", self.numerator, self.denominator.describe())
    }
}

/// `coefficient · |x − center|^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPower {
    pub coefficient: f64,
    pub exponent: f64,
    pub center: Point4,
}

impl RadialPower {
    pub fn new(coefficient: f64, exponent: f64, center: Point4) -> Self {
        Self {
            coefficient,
            exponent,
            center,
        }
    }
}

impl ScalarField for RadialPower {
    fn value(&self, x: &Point4) -> f64 {
        self.coefficient * (x - self.center).norm().powf(self.exponent)
    }
    fn gradient(&self, x: &Point4) -> Option<Vec4> {
        let y = x - self.center;
        let r2 = y.norm_squared();
        Some(y * (self.coefficient * self.exponent * r2.powf(0.5 * self.exponent - 1.0)))
    }
    fn hessian(&self, x: &Point4) -> Option<Hessian4> {
        let y = x - self.center;
        let r2 = y.norm_squared();
        let s = self.coefficient * self.exponent * r2.powf(0.5 * self.exponent - 1.0);
        Some(
            (Hessian4::identity() + y * y.transpose() * ((self.exponent - 2.0) / r2)) * s,
        )
    }
    fn singular_set(&self) -> Vec<Singularity> {
        vec![Singularity::Point(self.center)]
    }
    fn describe(&self) -> String {
        format!("{}|x - c|^{}", self.coefficient, self.exponent)
    }
}

/// `exp(⟨k, x⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpLinear {
    pub k: Vec4,
}

impl ScalarField for ExpLinear {
    fn value(&self, x: &Point4) -> f64 {
        self.k.dot(x).exp()
    }
    fn gradient(&self, x: &Point4) -> Option<Vec4> {
        Some(self.k * self.value(x))
    }
    fn hessian(&self, x: &Point4) -> Option<Hessian4> {
        Some(self.k * self.k.transpose() * self.value(x))
    }
    fn describe(&self) -> String {
        "exp(<k,x>)".into()
    }
}

/// `1 + amplitude · x₁²/(1 + |x|²)`, the multiplicative perturbation used to
/// knock solutions off their equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpPerturbation {
    pub amplitude: f64,
}

impl ScalarField for BumpPerturbation {
    fn value(&self, x: &Point4) -> f64 {
        1.0 + self.amplitude * x[0] * x[0] / (1.0 + x.norm_squared())
    }
    fn gradient(&self, x: &Point4) -> Option<Vec4> {
        let q = 1.0 + x.norm_squared();
        let mut g = x * (-2.0 * x[0] * x[0] / (q * q));
        g[0] += 2.0 * x[0] / q;
        Some(g * self.amplitude)
    }
    fn hessian(&self, x: &Point4) -> Option<Hessian4> {
        let q = 1.0 + x.norm_squared();
        let x1 = x[0];
        let mut h = Hessian4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                h[(i, j)] = 2.0 * d(i, 0) * d(j, 0) / q
                    - 4.0 * x1 * (d(i, 0) * x[j] + d(j, 0) * x[i]) / (q * q)
                    - 2.0 * x1 * x1 * d(i, j) / (q * q)
                    + 8.0 * x1 * x1 * x[i] * x[j] / (q * q * q);
            }
        }
        Some(h * self.amplitude)
    }
    fn describe(&self) -> String {
        format!("1 + {} x1^2/(1+|x|^2)", self.amplitude)
    }
}

/// Pointwise product of two fields.
#[derive(Clone)]
pub struct Product {
    pub left: Arc<dyn ScalarField>,
    pub right: Arc<dyn ScalarField>,
}

impl Product {
    pub fn new(left: Arc<dyn ScalarField>, right: Arc<dyn ScalarField>) -> Self {
        Self { left, right }
    }
}

impl ScalarField for Product {
    fn value(&self, x: &Point4) -> f64 {
        self.left.value(x) * self.right.value(x)
    }
    fn gradient(&self, x: &Point4) -> Option<Vec4> {
        let (f, g) = (self.left.value(x), self.right.value(x));
        Some(self.right.gradient(x)? * f + self.left.gradient(x)? * g)
    }
    fn hessian(&self, x: &Point4) -> Option<Hessian4> {
        let (f, g) = (self.left.value(x), self.right.value(x));
        let (df, dg) = (self.left.gradient(x)?, self.right.gradient(x)?);
        let (hf, hg) = (self.left.hessian(x)?, self.right.hessian(x)?);
        Some(hg * f + hf * g + df * dg.transpose() + dg * df.transpose())
    }
    fn singular_set(&self) -> Vec<Singularity> {
        let mut s = self.left.singular_set();
        s.extend(self.right.singular_set());
        s
    }
    fn describe(&self) -> String {
        format!("({}) * ({})", self.left.describe(), self.right.describe())
    }
}

/// A value-only field wrapping a closure; derivatives come from fd.
pub struct FnField<F> {
    name: String,
    f: F,
    singular: Vec<Singularity>,
}

impl<F: Fn(&Point4) -> f64 + Send + Sync> FnField<F> {
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self {
            name: name.into(),
            f,
            singular: Vec::new(),
        }
    }

    pub fn with_singularities(mut self, s: Vec<Singularity>) -> Self {
        self.singular = s;
        self
    }
}

impl<F: Fn(&Point4) -> f64 + Send + Sync> ScalarField for FnField<F> {
    fn value(&self, x: &Point4) -> f64 {
        (self.f)(x)
    }
    fn singular_set(&self) -> Vec<Singularity> {
        self.singular.clone()
    }
    fn describe(&self) -> String {
        self.name.clone()
    }
}
