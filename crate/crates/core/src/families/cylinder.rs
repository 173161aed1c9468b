//! The cylinder map `ℝ⁴∖{0} → ℝ × S³`, `rθ ↦ (ln r, θ)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{Point4, Vec4, SINGULAR_EXCLUSION};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CylinderImage {
    pub t: f64,
    pub theta: [f64; 4],
    /// The conformal factor `1/|x|`.
    pub factor: f64,
}

pub fn cylinder_check(x: &Point4) -> Result<CylinderImage> {
    let r = x.norm();
    if !(r >= SINGULAR_EXCLUSION) || !r.is_finite() {
        return Err(Error::Domain(format!(
            "the cylinder map is undefined at {:?}",
            x.as_slice()
        )));
    }
    let th = x / r;
    Ok(CylinderImage {
        t: r.ln(),
        theta: [th[0], th[1], th[2], th[3]],
        factor: 1.0 / r,
    })
}

/// `max |φ*h − λ²g| / λ²` at `x`, with the Jacobian of `x ↦ (t, θ) ∈ ℝ⁵`
/// taken by central differences of step `h·|x|`. The product metric on
/// `ℝ × S³` is the restriction of the Euclidean metric of `ℝ × ℝ⁴`.
pub fn cylinder_pullback_defect(x: &Point4, h: f64) -> Result<f64> {
    let img = cylinder_check(x)?;
    let step = h * x.norm();
    let embed = |y: &Point4| -> Result<[f64; 5]> {
        let c = cylinder_check(y)?;
        Ok([c.t, c.theta[0], c.theta[1], c.theta[2], c.theta[3]])
    };
    let mut jac = [[0.0; 4]; 5];
    for k in 0..4 {
        let mut e = Vec4::zeros();
        e[k] = step;
        let (p, m) = (embed(&(x + e))?, embed(&(x - e))?);
        for i in 0..5 {
            jac[i][k] = (p[i] - m[i]) / (2.0 * step);
        }
    }
    let l2 = img.factor * img.factor;
    let mut defect: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            let pull: f64 = (0..5).map(|i| jac[i][a] * jac[i][b]).sum();
            let target = if a == b { l2 } else { 0.0 };
            defect = defect.max((pull - target).abs() / l2);
        }
    }
    Ok(defect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn plug_in_values() {
        let c = cylinder_check(&Point4::new(E, 0.0, 0.0, 0.0)).unwrap();
        assert!((c.t - 1.0).abs() < 1e-15);
        assert_eq!(c.theta, [1.0, 0.0, 0.0, 0.0]);
        assert!((c.factor - 1.0 / E).abs() < 1e-15);
        let c = cylinder_check(&Point4::new(0.0, 0.6, 0.0, 0.8)).unwrap();
        assert!(c.t.abs() < 1e-15);
        assert!((c.factor - 1.0).abs() < 1e-15);
        assert!(cylinder_check(&Point4::zeros()).is_err());
    }

    #[test]
    fn pullback_is_conformal() {
        for k in 0..20 {
            let s = k as f64;
            let x = Point4::new((s * 1.3).sin(), (s * 0.7).cos(), 0.5 + 0.1 * s, -(s * 0.4).sin());
            let d = cylinder_pullback_defect(&x, 1e-5).unwrap();
            assert!(d < 1e-8, "{d}");
        }
    }
}
