//! Axisymmetric solutions of `−Δu + ku = u³` on the unit S⁴.

use std::f64::consts::PI;

use serde::Serialize;

use super::linalg::{smallest_singular_value, Tridiagonal};
use super::profile::{sup, BranchPoint, EquationTag, RadialProfile};
use super::NewtonOptions;
use crate::error::{Error, Result};

pub fn polar_grid(n: usize) -> Vec<f64> {
    (0..=n).map(|i| i as f64 * PI / n as f64).collect()
}

/// Pointwise residual `−u″ − 3cot θ u′ + ku − u³` on `θ_i = iπ/N`. The
/// poles use the limit `−4u″ + ku − u³` with the Neumann ghost value.
pub fn s4_axisym_operator(u: &[f64], k: f64) -> Vec<f64> {
    let n = u.len() - 1;
    let h = PI / n as f64;
    let h2 = h * h;
    let react = |v: f64| k * v - v * v * v;
    let mut r = Vec::with_capacity(n + 1);
    r.push(-8.0 * (u[1] - u[0]) / h2 + react(u[0]));
    for i in 1..n {
        let cot = 1.0 / (i as f64 * h).tan();
        r.push(
            -(u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2
                - 3.0 * cot * (u[i + 1] - u[i - 1]) / (2.0 * h)
                + react(u[i]),
        );
    }
    r.push(-8.0 * (u[n - 1] - u[n]) / h2 + react(u[n]));
    r
}

/// Jacobian of [`s4_axisym_operator`] with respect to `u`.
pub fn s4_jacobian(u: &[f64], k: f64) -> Tridiagonal {
    let n = u.len() - 1;
    let h = PI / n as f64;
    let h2 = h * h;
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n + 1];
    let mut upper = vec![0.0; n];
    diag[0] = 8.0 / h2 + k - 3.0 * u[0] * u[0];
    upper[0] = -8.0 / h2;
    for i in 1..n {
        let c = 3.0 / (i as f64 * h).tan() / (2.0 * h);
        lower[i - 1] = -1.0 / h2 + c;
        diag[i] = 2.0 / h2 + k - 3.0 * u[i] * u[i];
        upper[i] = -1.0 / h2 - c;
    }
    lower[n - 1] = -8.0 / h2;
    diag[n] = 8.0 / h2 + k - 3.0 * u[n] * u[n];
    Tridiagonal { lower, diag, upper }
}

/// Axisymmetric spherical harmonic of degree `ℓ`, the Gegenbauer
/// polynomial `C_ℓ^{3/2}(cos θ)` scaled to equal 1 at `θ = 0`.
pub fn axisym_mode(ell: usize, theta: f64) -> f64 {
    let x = theta.cos();
    let (mut c0, mut c1) = (1.0, 3.0 * x);
    if ell == 0 {
        return 1.0;
    }
    for m in 2..=ell {
        let mf = m as f64;
        let c2 = (2.0 * x * (mf + 0.5) * c1 - (mf + 1.0) * c0) / mf;
        c0 = c1;
        c1 = c2;
    }
    let at_one = ((ell + 1) * (ell + 2)) as f64 / 2.0;
    c1 / at_one
}

/// `k_ℓ = ℓ(ℓ+3)/2`, where the linearization `−Δ − 2k` at `u ≡ √k` is singular.
pub fn bifurcation_points(ell: usize) -> Result<f64> {
    if ell < 1 {
        return Err(Error::InvalidArgument("bifurcation index needs ℓ >= 1".into()));
    }
    Ok((ell * (ell + 3)) as f64 / 2.0)
}

/// `∫_{S⁴} |∇u|² = |S³| ∫₀^π u′² sin³θ dθ`, midpoint rule on the cells.
pub fn gradient_energy(u: &[f64]) -> f64 {
    let n = u.len() - 1;
    let h = PI / n as f64;
    let s: f64 = (0..n)
        .map(|i| {
            let d = (u[i + 1] - u[i]) / h;
            d * d * ((i as f64 + 0.5) * h).sin().powi(3)
        })
        .sum();
    2.0 * PI * PI * s * h
}

/// `∫₀^π f sin³θ dθ` by the trapezoid rule on the polar grid.
pub(crate) fn weighted_integral(f: &[f64]) -> f64 {
    let n = f.len() - 1;
    let h = PI / n as f64;
    (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            w * f[i] * (i as f64 * h).sin().powi(3)
        })
        .sum::<f64>()
        * h
}

/// Coefficient `s` of the normalized mode on the bifurcating branch,
/// `u ≈ √k + s·φ_ℓ`, from the Lyapunov–Schmidt reduction
/// `s = (ℓ(ℓ+3) − 2k)⟨φ,φ⟩ / (3√k⟨φ³⟩)` with weight `sin³θ`.
pub fn lyapunov_schmidt_amplitude(ell: usize, k: f64, n: usize) -> Result<f64> {
    let grid = polar_grid(n);
    let phi: Vec<f64> = grid.iter().map(|t| axisym_mode(ell, *t)).collect();
    let p2 = weighted_integral(&phi.iter().map(|p| p * p).collect::<Vec<_>>());
    let p3 = weighted_integral(&phi.iter().map(|p| p * p * p).collect::<Vec<_>>());
    if p3.abs() < 1e-12 * p2 {
        return Err(Error::Branch(format!(
            "mode ℓ = {ell} has ⟨φ³⟩ = 0; the bifurcation is not transcritical"
        )));
    }
    let lam = (ell * (ell + 3)) as f64;
    Ok((lam - 2.0 * k) * p2 / (3.0 * k.sqrt() * p3))
}

/// Starting profile for [`solve_s4`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum S4Init {
    /// `u ≡ √k`.
    Constant,
    /// `√k + amplitude·φ_ℓ`.
    Mode { ell: usize, amplitude: f64 },
    /// `√k + s·φ_ℓ` with `s` from the Lyapunov–Schmidt reduction.
    Branch { ell: usize },
}

impl S4Init {
    pub fn profile(&self, k: f64, n: usize) -> Result<Vec<f64>> {
        let base = k.sqrt();
        let grid = polar_grid(n);
        Ok(match *self {
            S4Init::Constant => vec![base; n + 1],
            S4Init::Mode { ell, amplitude } => grid
                .iter()
                .map(|t| base + amplitude * axisym_mode(ell, *t))
                .collect(),
            S4Init::Branch { ell } => {
                let s = lyapunov_schmidt_amplitude(ell, k, n)?;
                grid.iter().map(|t| base + s * axisym_mode(ell, *t)).collect()
            }
        })
    }
}

pub(crate) fn branch_point(k: f64, u: Vec<f64>, arclength: f64, iterations: usize) -> Result<BranchPoint> {
    let n = u.len() - 1;
    let amplitude = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - u.iter().cloned().fold(f64::INFINITY, f64::min);
    let gradient_energy = gradient_energy(&u);
    Ok(BranchPoint {
        k,
        profile: RadialProfile::new(EquationTag::S4Axisym { k }, polar_grid(n), u)?,
        arclength,
        amplitude,
        gradient_energy,
        newton_iterations: iterations,
    })
}

/// Damped Newton for `F(u) = 0` with a tridiagonal Jacobian. A step that
/// leaves the positive cone or fails to reduce `sup|F|` is halved.
pub(crate) fn newton_tridiagonal(
    mut u: Vec<f64>,
    residual: impl Fn(&[f64]) -> Vec<f64>,
    jacobian: impl Fn(&[f64]) -> Tridiagonal,
    opts: &NewtonOptions,
) -> Result<(Vec<f64>, usize)> {
    if let Some(m) = u.iter().cloned().reduce(f64::min).filter(|m| !(*m > 0.0)) {
        return Err(Error::Positivity {
            iteration: 0,
            min_value: m,
        });
    }
    let mut f = residual(&u);
    let mut norm = sup(&f);
    for iteration in 0..opts.max_iterations {
        if norm < opts.tolerance {
            return Ok((u, iteration));
        }
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let du = jacobian(&u).solve(&rhs)?;
        let mut t = 1.0;
        let mut min_seen = f64::INFINITY;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = u.iter().zip(&du).map(|(a, d)| a + t * d).collect();
            let m = trial.iter().cloned().fold(f64::INFINITY, f64::min);
            min_seen = min_seen.min(m);
            if m > 0.0 {
                let ft = residual(&trial);
                let nt = sup(&ft);
                if nt < norm {
                    u = trial;
                    f = ft;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            if min_seen <= 0.0 {
                return Err(Error::Positivity {
                    iteration,
                    min_value: min_seen,
                });
            }
            return Err(Error::Convergence {
                iterations: iteration,
                residual: norm,
            });
        }
    }
    if norm < opts.tolerance {
        return Ok((u, opts.max_iterations));
    }
    Err(Error::Convergence {
        iterations: opts.max_iterations,
        residual: norm,
    })
}

/// Newton solve of the axisymmetric equation at fixed `k` from `init`.
pub fn solve_s4(k: f64, init: &[f64], opts: &NewtonOptions) -> Result<BranchPoint> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!("k must be positive, got {k}")));
    }
    if init.len() < 5 {
        return Err(Error::InvalidArgument("S⁴ grid needs at least 4 intervals".into()));
    }
    let (u, it) = newton_tridiagonal(
        init.to_vec(),
        |u| s4_axisym_operator(u, k),
        |u| s4_jacobian(u, k),
        opts,
    )?;
    branch_point(k, u, 0.0, it)
}

/// `σ_min` of the Jacobian at the constant solution `u ≡ √k` on `n` intervals.
pub fn constant_branch_sigma_min(k: f64, n: usize) -> f64 {
    let u = vec![k.sqrt(); n + 1];
    smallest_singular_value(&s4_jacobian(&u, k), 400, 1e-13)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaMinimum {
    pub k: f64,
    pub sigma_min: f64,
}

/// Scans `σ_min(k)` over `[k_lo, k_hi]` with spacing `dk` and refines each
/// interior local minimum by golden-section search.
pub fn scan_singular_values(k_lo: f64, k_hi: f64, dk: f64, n: usize) -> Vec<SigmaMinimum> {
    let m = ((k_hi - k_lo) / dk).round() as usize;
    let ks: Vec<f64> = (0..=m).map(|i| k_lo + i as f64 * dk).collect();
    let s: Vec<f64> = ks.iter().map(|k| constant_branch_sigma_min(*k, n)).collect();
    let mut out = Vec::new();
    for i in 1..m {
        if s[i] < s[i - 1] && s[i] <= s[i + 1] {
            let (mut a, mut b) = (ks[i - 1], ks[i + 1]);
            let g = (5f64.sqrt() - 1.0) / 2.0;
            let mut c = b - g * (b - a);
            let mut d = a + g * (b - a);
            let (mut fc, mut fd) = (constant_branch_sigma_min(c, n), constant_branch_sigma_min(d, n));
            while b - a > 1e-7 {
                if fc < fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - g * (b - a);
                    fc = constant_branch_sigma_min(c, n);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + g * (b - a);
                    fd = constant_branch_sigma_min(d, n);
                }
            }
            let k = 0.5 * (a + b);
            out.push(SigmaMinimum {
                k,
                sigma_min: constant_branch_sigma_min(k, n),
            });
        }
    }
    out
}

/// Cubic (Catmull–Rom) interpolation of a polar profile onto `2N` intervals,
/// using the even reflection across both poles.
pub fn interpolate_to_double(u: &[f64]) -> Vec<f64> {
    let n = u.len() - 1;
    let at = |i: isize| -> f64 {
        let j = if i < 0 {
            -i
        } else if i > n as isize {
            2 * n as isize - i
        } else {
            i
        };
        u[j as usize]
    };
    let mut out = Vec::with_capacity(2 * n + 1);
    for (i, &ui) in u.iter().enumerate().take(n) {
        let ii = i as isize;
        out.push(ui);
        out.push((-at(ii - 1) + 9.0 * at(ii) + 9.0 * at(ii + 1) - at(ii + 2)) / 16.0);
    }
    out.push(u[n]);
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinedCheck {
    /// Residual of the interpolated profile on the `2N` grid.
    pub interpolated_residual: f64,
    /// Residual after Newton polishing on the `2N` grid.
    pub polished_residual: f64,
    /// `sup |u_2N − interpolated|`, the discretization gap.
    pub polish_change: f64,
    pub polished_amplitude: f64,
}

/// Re-evaluates a branch point on the doubled grid: first the interpolated
/// profile as is, then after Newton polishing from it.
pub fn verify_refined(bp: &BranchPoint, opts: &NewtonOptions) -> Result<RefinedCheck> {
    let fine = interpolate_to_double(&bp.profile.values);
    let interpolated_residual = sup(&s4_axisym_operator(&fine, bp.k));
    let polished = solve_s4(bp.k, &fine, opts)?;
    let polish_change = polished
        .profile
        .values
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(RefinedCheck {
        interpolated_residual,
        polished_residual: polished.profile.residual_sup,
        polish_change,
        polished_amplitude: polished.amplitude,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_profiles() {
        for k in [0.5, 3.0, 9.0] {
            let u = vec![f64::sqrt(k); 41];
            assert!(sup(&s4_axisym_operator(&u, k)) < 1e-12);
        }
        let r = s4_axisym_operator(&vec![1.0; 41], 3.0);
        assert!(r.iter().all(|v| (v - 2.0).abs() < 1e-12));
    }

    #[test]
    fn modes_and_thresholds() {
        assert_eq!(axisym_mode(2, 0.0), 1.0);
        assert!((axisym_mode(2, 1.0) - (5.0 * 1f64.cos().powi(2) - 1.0) / 4.0).abs() < 1e-14);
        assert!((axisym_mode(1, PI) + 1.0).abs() < 1e-14);
        assert_eq!(bifurcation_points(1).unwrap(), 2.0);
        assert_eq!(bifurcation_points(2).unwrap(), 5.0);
        assert_eq!(bifurcation_points(3).unwrap(), 9.0);
        assert!(bifurcation_points(0).is_err());
    }

    #[test]
    fn jacobian_matches_fd() {
        let n = 20;
        let u: Vec<f64> = polar_grid(n).iter().map(|t| 2.0 + 0.3 * t.cos()).collect();
        let j = s4_jacobian(&u, 4.0);
        let e = 1e-6;
        for col in [0, 1, 7, n] {
            let mut up = u.clone();
            up[col] += e;
            let mut um = u.clone();
            um[col] -= e;
            let fp = s4_axisym_operator(&up, 4.0);
            let fm = s4_axisym_operator(&um, 4.0);
            let mut unit = vec![0.0; n + 1];
            unit[col] = 1.0;
            let jc = j.mul_vec(&unit);
            for row in 0..=n {
                let fd = (fp[row] - fm[row]) / (2.0 * e);
                assert!((fd - jc[row]).abs() < 1e-4 * (1.0 + fd.abs()), "({row},{col})");
            }
        }
    }

    #[test]
    fn energy_of_constant_is_zero() {
        assert_eq!(gradient_energy(&[2.0; 11]), 0.0);
        // u = cos θ: ∫ sin²θ sin³θ dθ = 16/15.
        let u: Vec<f64> = polar_grid(2000).iter().map(|t| t.cos()).collect();
        assert!((gradient_energy(&u) - 2.0 * PI * PI * 16.0 / 15.0).abs() < 1e-4);
    }

    #[test]
    fn lyapunov_schmidt_sign() {
        assert!(lyapunov_schmidt_amplitude(2, 5.1, 400).unwrap() < 0.0);
        assert!(lyapunov_schmidt_amplitude(2, 4.9, 400).unwrap() > 0.0);
        assert!(lyapunov_schmidt_amplitude(1, 2.5, 400).is_err());
    }

    #[test]
    fn interpolation_preserves_smooth_profiles() {
        let n = 100;
        let u: Vec<f64> = polar_grid(n).iter().map(|t| 1.0 + (2.0 * t).cos()).collect();
        let fine = interpolate_to_double(&u);
        let exact: Vec<f64> = polar_grid(2 * n).iter().map(|t| 1.0 + (2.0 * t).cos()).collect();
        let err = fine.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }
}
