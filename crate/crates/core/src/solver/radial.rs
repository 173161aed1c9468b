//! Radial solutions of `Δv = −2v³` on ℝ⁴.

use serde::Serialize;

use super::profile::{sup, EquationTag, RadialProfile};
use super::NewtonOptions;
use crate::error::{Error, Result};
use crate::families::Bubble;
use crate::fields::FieldN;

/// Discrete residual of `v″ + (3/r)v′ + 2v³` on the uniform grid
/// `r_i = i·h`. Entry 0 is the regularized center equation
/// `8(v₁ − v₀)/h² + 2v₀³`; entry `i` for `1 ≤ i < N` is the interior
/// equation at `r_i`.
pub fn radial_residual(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len() - 1;
    let h2 = h * h;
    let mut r = Vec::with_capacity(n);
    r.push(8.0 * (v[1] - v[0]) / h2 + 2.0 * v[0].powi(3));
    for i in 1..n {
        let ri = i as f64 * h;
        r.push(
            (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2
                + 3.0 / ri * (v[i + 1] - v[i - 1]) / (2.0 * h)
                + 2.0 * v[i].powi(3),
        );
    }
    r
}

/// Full system: the pin `v₀ − v_c` followed by [`radial_residual`].
fn system(v: &[f64], h: f64, v_center: f64) -> Vec<f64> {
    let mut f = Vec::with_capacity(v.len());
    f.push(v[0] - v_center);
    f.extend(radial_residual(v, h));
    f
}

/// Newton step for the lower-triangular Jacobian of [`system`]:
/// row `i+1` couples `v_{i−1}, v_i, v_{i+1}`.
fn newton_step(v: &[f64], f: &[f64], h: f64) -> Vec<f64> {
    let n = v.len() - 1;
    let h2 = h * h;
    let mut dv = vec![0.0; n + 1];
    dv[0] = -f[0];
    dv[1] = (-f[1] - (-8.0 / h2 + 6.0 * v[0] * v[0]) * dv[0]) / (8.0 / h2);
    for i in 1..n {
        let ri = i as f64 * h;
        let c = 3.0 / (2.0 * h * ri);
        let sub = 1.0 / h2 - c;
        let diag = -2.0 / h2 + 6.0 * v[i] * v[i];
        let sup_ = 1.0 / h2 + c;
        dv[i + 1] = (-f[i + 1] - sub * dv[i - 1] - diag * dv[i]) / sup_;
    }
    dv
}

/// Far-field Robin defect `v′(r_max) + 2v(r_max)/r_max`, with a one-sided
/// second-order difference. Reported as a diagnostic; it is not imposed.
pub fn robin_defect(p: &RadialProfile) -> f64 {
    let v = &p.values;
    let n = v.len() - 1;
    let h = p.grid[1];
    let dv = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h);
    dv + 2.0 * v[n] / p.grid[n]
}

#[derive(Debug, Clone, Serialize)]
pub struct BubbleComparison {
    pub delta: f64,
    pub sup_error: f64,
    pub robin_defect: f64,
}

/// Compares a radial profile with the bubble of the same central value,
/// `δ = 2/v(0)`.
pub fn compare_with_bubble(p: &RadialProfile) -> Result<BubbleComparison> {
    let delta = 2.0 / p.values[0];
    let b = Bubble::new(4, delta, vec![0.0; 4])?;
    let sup_error = p
        .grid
        .iter()
        .zip(&p.values)
        .map(|(r, v)| (b.value(&[*r, 0.0, 0.0, 0.0]) - v).abs())
        .fold(0.0, f64::max);
    Ok(BubbleComparison {
        delta,
        sup_error,
        robin_defect: robin_defect(p),
    })
}

/// Solves `v″ + (3/r)v′ + 2v³ = 0`, `v(0) = v_center`, `v′(0) = 0` on a
/// uniform grid of `n` intervals over `[0, r_max]` by damped Newton.
///
/// The center row is the l'Hôpital limit `4v″(0) + 2v³ = 0`. With the
/// pin this determines the profile, so the Jacobian is lower triangular.
pub fn solve_radial_r4(
    v_center: f64,
    r_max: f64,
    n: usize,
    opts: &NewtonOptions,
) -> Result<RadialProfile> {
    if !(v_center > 0.0) || !v_center.is_finite() {
        return Err(Error::InvalidArgument(format!("v_center must be positive, got {v_center}")));
    }
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(Error::InvalidArgument(format!("r_max must be positive, got {r_max}")));
    }
    if n < 100 {
        return Err(Error::InvalidArgument(format!("radial solver needs N >= 100, got {n}")));
    }
    let h = r_max / n as f64;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let mut v: Vec<f64> = grid.iter().map(|r| v_center * (-0.5 * r).exp()).collect();
    let mut f = system(&v, h, v_center);
    let mut norm = sup(&f);
    for iteration in 0..opts.max_iterations {
        if norm < opts.tolerance {
            return RadialProfile::new(EquationTag::R4Bubble, grid, v);
        }
        let dv = newton_step(&v, &f, h);
        let mut t = 1.0;
        let mut accepted = false;
        let mut min_seen = f64::INFINITY;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = v.iter().zip(&dv).map(|(a, d)| a + t * d).collect();
            let m = trial.iter().cloned().fold(f64::INFINITY, f64::min);
            min_seen = min_seen.min(m);
            if m > 0.0 {
                let ft = system(&trial, h, v_center);
                let nt = sup(&ft);
                if nt.is_finite() && (nt < norm || t == 1.0 && nt < 10.0 * norm) {
                    v = trial;
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
            break;
        }
    }
    if norm < opts.tolerance {
        return RadialProfile::new(EquationTag::R4Bubble, grid, v);
    }
    Err(Error::Convergence {
        iterations: opts.max_iterations,
        residual: norm,
    })
}
