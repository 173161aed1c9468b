//! Sobolev quotients `∫|∇v|² / (∫|v|^p)^{2/p}` with `p = 2n/(n−2)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{gradient, DerivativeMode, Point4, ScalarField};

/// Tail estimates above this fraction of an integral raise a warning.
pub const TAIL_WARNING_FRACTION: f64 = 0.01;

/// A radially symmetric function on ℝⁿ, given by its profile.
pub trait RadialFunction: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, r: f64) -> f64;
    fn derivative(&self, r: f64) -> f64;
}

/// Bubble profile `(2δ/(δ² + r²))^{(n−2)/2}`.
#[derive(Debug, Clone, Copy)]
pub struct BubbleRadial {
    pub n: usize,
    pub delta: f64,
}

impl RadialFunction for BubbleRadial {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, r: f64) -> f64 {
        let m = (self.n as f64 - 2.0) / 2.0;
        (2.0 * self.delta / (self.delta * self.delta + r * r)).powf(m)
    }
    fn derivative(&self, r: f64) -> f64 {
        let m = (self.n as f64 - 2.0) / 2.0;
        -2.0 * m * self.value(r) * r / (self.delta * self.delta + r * r)
    }
}

/// `exp(−s r²)`.
#[derive(Debug, Clone, Copy)]
pub struct GaussianRadial {
    pub n: usize,
    pub s: f64,
}

impl RadialFunction for GaussianRadial {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, r: f64) -> f64 {
        (-self.s * r * r).exp()
    }
    fn derivative(&self, r: f64) -> f64 {
        -2.0 * self.s * r * self.value(r)
    }
}

/// `scale · f`.
pub struct ScaledRadial<F> {
    pub scale: f64,
    pub inner: F,
}

impl<F: RadialFunction> RadialFunction for ScaledRadial<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, r: f64) -> f64 {
        self.scale * self.inner.value(r)
    }
    fn derivative(&self, r: f64) -> f64 {
        self.scale * self.inner.derivative(r)
    }
}

/// Composite Gauss–Legendre rule on `[0, r_max]`: one panel on
/// `[0, r_min]`, then geometrically growing panels.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RadialQuadrature {
    pub r_min: f64,
    pub r_max: f64,
    pub panels: usize,
    pub order: usize,
}

impl Default for RadialQuadrature {
    fn default() -> Self {
        Self {
            r_min: 1e-3,
            r_max: 1e4,
            panels: 160,
            order: 16,
        }
    }
}

impl RadialQuadrature {
    fn nodes(&self) -> Vec<(f64, f64)> {
        let (x, w) = gauss_legendre(self.order);
        let ratio = (self.r_max / self.r_min).powf(1.0 / self.panels as f64);
        let mut edges = vec![0.0, self.r_min];
        for k in 1..=self.panels {
            edges.push(self.r_min * ratio.powi(k as i32));
        }
        let mut out = Vec::with_capacity(edges.len() * self.order);
        for pair in edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (b + a);
            out.extend(x.iter().zip(&w).map(|(xi, wi)| (mid + half * xi, half * wi)));
        }
        out
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` by Newton iteration on
/// the Legendre polynomial.
pub(crate) fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn gamma_half_integer(two_x: u32) -> f64 {
    // Γ(two_x / 2) for a positive integer two_x.
    let mut g = if two_x.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut k = if two_x.is_multiple_of(2) { 2 } else { 1 };
    while k < two_x {
        g *= k as f64 / 2.0;
        k += 2;
    }
    g
}

/// Surface area of the unit sphere `S^{n−1} ⊂ ℝⁿ`.
pub(crate) fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n as u32)
}

/// Which volume `w_n` enters `c = n(n−2)/4 · w_n^{2/n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SobolevConvention {
    /// `w_n = |Sⁿ|`, the volume of the unit n-sphere.
    UnitSphereVolume,
    /// `w_n = |Bⁿ|`, the volume of the unit n-ball.
    UnitBallVolume,
}

impl SobolevConvention {
    pub const ALL: [SobolevConvention; 2] = [
        SobolevConvention::UnitSphereVolume,
        SobolevConvention::UnitBallVolume,
    ];

    pub fn volume(self, n: usize) -> f64 {
        match self {
            SobolevConvention::UnitSphereVolume => sphere_area(n + 1),
            SobolevConvention::UnitBallVolume => sphere_area(n) / n as f64,
        }
    }

    /// Conventions whose constant lies within `rel_tol` of `quotient`.
    pub fn matching(n: usize, quotient: f64, rel_tol: f64) -> Vec<SobolevConvention> {
        Self::ALL
            .into_iter()
            .filter(|c| {
                let b = best_sobolev_constant(n, *c);
                ((quotient - b) / b).abs() < rel_tol
            })
            .collect()
    }
}

/// `n(n−2)/4 · w_n^{2/n}`.
pub fn best_sobolev_constant(n: usize, convention: SobolevConvention) -> f64 {
    let nf = n as f64;
    nf * (nf - 2.0) / 4.0 * convention.volume(n).powf(2.0 / nf)
}

#[derive(Debug, Clone, Serialize)]
pub struct SobolevQuotient {
    pub value: f64,
    pub gradient_integral: f64,
    pub power_integral: f64,
    /// Largest tail estimate relative to its integral.
    pub tail_fraction: f64,
    pub warning: Option<String>,
}

impl SobolevQuotient {
    fn assemble(n: usize, grad: f64, power: f64, tail_fraction: f64) -> Result<Self> {
        if !(power > 0.0) || !grad.is_finite() {
            return Err(Error::IllConditioned(format!(
                "Sobolev integrals degenerate: ∫|∇v|² = {grad}, ∫|v|^p = {power}"
            )));
        }
        let p = 2.0 * n as f64 / (n as f64 - 2.0);
        let warning = (tail_fraction > TAIL_WARNING_FRACTION).then(|| {
            format!(
                "truncation tail is {:.1}% of an integral; quotient is inaccurate",
                100.0 * tail_fraction
            )
        });
        Ok(Self {
            value: grad / power.powf(2.0 / p),
            gradient_integral: grad,
            power_integral: power,
            tail_fraction,
            warning,
        })
    }
}

/// Power-law tail `∫_R^∞ g` of a positive integrand sampled at `R/2` and `R`.
fn power_tail(g_half: f64, g_end: f64, r_end: f64) -> f64 {
    if g_end <= 0.0 || !g_end.is_finite() {
        return 0.0;
    }
    if g_half <= 0.0 {
        return f64::INFINITY;
    }
    let s = (g_half / g_end).ln() / 2f64.ln();
    if s <= 1.0 {
        f64::INFINITY
    } else {
        g_end * r_end / (s - 1.0)
    }
}

/// Quotient of a radial function by one-dimensional quadrature in `r`.
pub fn sobolev_quotient(v: &dyn RadialFunction, quad: &RadialQuadrature) -> Result<SobolevQuotient> {
    let n = v.dim();
    if n < 3 {
        return Err(Error::InvalidArgument(format!("Sobolev quotient needs n >= 3, got {n}")));
    }
    let p = 2.0 * n as f64 / (n as f64 - 2.0);
    let grad_density = |r: f64| v.derivative(r).powi(2) * r.powi(n as i32 - 1);
    let power_density = |r: f64| v.value(r).abs().powf(p) * r.powi(n as i32 - 1);
    let (mut grad, mut power) = (0.0, 0.0);
    for (r, w) in quad.nodes() {
        grad += w * grad_density(r);
        power += w * power_density(r);
    }
    let area = sphere_area(n);
    grad *= area;
    power *= area;
    let r = quad.r_max;
    let tail_g = area * power_tail(grad_density(r / 2.0), grad_density(r), r);
    let tail_p = area * power_tail(power_density(r / 2.0), power_density(r), r);
    let frac = (tail_g / grad).max(tail_p / power);
    SobolevQuotient::assemble(n, grad, power, frac)
}

/// Quotient of a general 4-D field by tensor Gauss–Legendre quadrature on
/// the cube `[−L, L]⁴` with `m` nodes per axis. The tail estimate is the
/// relative change against the cube of half-width `0.75 L`.
pub fn sobolev_quotient_tensor(
    f: &dyn ScalarField,
    half_width: f64,
    m: usize,
) -> Result<SobolevQuotient> {
    let integrate = |l: f64| -> Result<(f64, f64)> {
        let (x, w) = gauss_legendre(m);
        let nodes: Vec<(f64, f64)> = x.iter().zip(&w).map(|(a, b)| (a * l, b * l)).collect();
        let (mut grad, mut power) = (0.0, 0.0);
        for &(x0, w0) in &nodes {
            for &(x1, w1) in &nodes {
                for &(x2, w2) in &nodes {
                    for &(x3, w3) in &nodes {
                        let p = Point4::new(x0, x1, x2, x3);
                        let wt = w0 * w1 * w2 * w3;
                        let mode = if f.gradient(&p).is_some() {
                            DerivativeMode::Analytic
                        } else {
                            DerivativeMode::fd()
                        };
                        let g = gradient(f, &p, mode)?;
                        grad += wt * g.norm_squared();
                        power += wt * f.value(&p).powi(4);
                    }
                }
            }
        }
        Ok((grad, power))
    };
    let (grad, power) = integrate(half_width)?;
    let (grad_s, power_s) = integrate(0.75 * half_width)?;
    let frac = ((grad - grad_s) / grad).abs().max(((power - power_s) / power).abs());
    SobolevQuotient::assemble(4, grad, power, frac)
}
