//! The periodic reduction `λ″ = aλ + Aλ³` on a flat torus direction.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::profile::{sup, EquationTag, RadialProfile};
use super::NewtonOptions;
use crate::error::{Error, Result};

pub fn periodic_grid(n: usize) -> Vec<f64> {
    let h = 2.0 * PI / n as f64;
    (0..n).map(|j| j as f64 * h).collect()
}

fn second_difference(l: &[f64]) -> Vec<f64> {
    let n = l.len();
    let h = 2.0 * PI / n as f64;
    (0..n)
        .map(|j| (l[(j + 1) % n] - 2.0 * l[j] + l[(j + n - 1) % n]) / (h * h))
        .collect()
}

/// `λ″ − aλ − Aλ³` with the periodic central stencil.
pub fn torus_residual(l: &[f64], a: f64, big_a: f64) -> Vec<f64> {
    second_difference(l)
        .iter()
        .zip(l)
        .map(|(d2, v)| d2 - a * v - big_a * v * v * v)
        .collect()
}

/// Per-iterate obstruction data.
#[derive(Debug, Clone, Serialize)]
pub struct TorusIterate {
    pub iteration: usize,
    /// `∫ λ³` over the period.
    pub integral_cube: f64,
    /// `∫ λ″` over the period; zero by telescoping.
    pub integral_second: f64,
    /// `sup |λ″ − Aλ³|`.
    pub residual_sup: f64,
    pub min_value: f64,
    /// The bordering multiplier `μ`.
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TorusOutcome {
    pub profile: RadialProfile,
    /// True iff the final iterate solves `λ″ = Aλ³` to tolerance.
    pub converged: bool,
    pub slack: f64,
    pub iterates: Vec<TorusIterate>,
    pub report: String,
}

/// Solves `λ″ = Aλ³` (Ricci-flat case `a = 0`) on `[0, 2π)` by Newton on
/// the bordered system
///
/// `λ″ − Aλ³ + μ = 0`, `mean(λ) = mean(λ_init)`.
///
/// The constant kernel of `d²/dθ²` makes the plain Newton system singular;
/// the mean constraint removes it and the multiplier `μ` absorbs the
/// solvability condition. Summing the equation gives `μ = A·mean(λ³)`, so
/// a positive solution of the original equation needs `A∫λ³ = 0`.
pub fn solve_torus(a: f64, big_a: f64, init: &[f64], opts: &NewtonOptions) -> Result<TorusOutcome> {
    if a != 0.0 {
        return Err(Error::Unsupported(format!(
            "the torus solver covers the Ricci-flat case a = 0, got a = {a}"
        )));
    }
    let n = init.len();
    if n < 8 {
        return Err(Error::InvalidArgument(format!("torus grid needs N >= 8, got {n}")));
    }
    if let Some(m) = init.iter().cloned().reduce(f64::min).filter(|m| !(*m > 0.0)) {
        return Err(Error::Positivity {
            iteration: 0,
            min_value: m,
        });
    }
    let h = 2.0 * PI / n as f64;
    let target_mean = init.iter().sum::<f64>() / n as f64;
    let bordered = |l: &[f64], mu: f64| -> Vec<f64> {
        let mut g: Vec<f64> = torus_residual(l, 0.0, big_a).iter().map(|r| r + mu).collect();
        g.push(l.iter().sum::<f64>() / n as f64 - target_mean);
        g
    };
    let record = |iteration: usize, l: &[f64], mu: f64| TorusIterate {
        iteration,
        integral_cube: h * l.iter().map(|v| v * v * v).sum::<f64>(),
        integral_second: h * second_difference(l).iter().sum::<f64>(),
        residual_sup: sup(&torus_residual(l, 0.0, big_a)),
        min_value: l.iter().cloned().fold(f64::INFINITY, f64::min),
        slack: mu,
    };

    let mut l = init.to_vec();
    let mut mu = 0.0;
    let mut g = bordered(&l, mu);
    let mut norm = sup(&g);
    let mut iterates = vec![record(0, &l, mu)];
    let h2 = h * h;
    for iteration in 1..=opts.max_iterations {
        if norm < opts.tolerance {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(n + 1, n + 1);
        for j in 0..n {
            jac[(j, (j + n - 1) % n)] += 1.0 / h2;
            jac[(j, (j + 1) % n)] += 1.0 / h2;
            jac[(j, j)] += -2.0 / h2 - 3.0 * big_a * l[j] * l[j];
            jac[(j, n)] = 1.0;
            jac[(n, j)] = 1.0 / n as f64;
        }
        let rhs = DVector::from_iterator(n + 1, g.iter().map(|v| -v));
        let step = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::IllConditioned("bordered torus Jacobian is singular".into()))?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = l.iter().enumerate().map(|(j, v)| v + t * step[j]).collect();
            if trial.iter().all(|v| *v > 0.0) {
                let mu_t = mu + t * step[n];
                let gt = bordered(&trial, mu_t);
                let nt = sup(&gt);
                if nt < norm {
                    l = trial;
                    mu = mu_t;
                    g = gt;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        iterates.push(record(iteration, &l, mu));
    }
    let last = iterates.last().expect("at least the initial iterate");
    let converged = norm < opts.tolerance && last.residual_sup < opts.tolerance;
    let report = if converged {
        format!(
            "converged to a positive periodic solution; max deviation from the mean {:.3e}",
            l.iter().map(|v| (v - target_mean).abs()).fold(0.0, f64::max)
        )
    } else {
        format!(
            "no positive periodic solution: the solvability multiplier is μ = A·mean(λ³) = {:.3e}, \
             A∫λ³ = {:.3e}",
            mu,
            big_a * last.integral_cube
        )
    };
    Ok(TorusOutcome {
        profile: RadialProfile::new(
            EquationTag::Torus1d { a, big_a },
            periodic_grid(n),
            l,
        )?,
        converged,
        slack: mu,
        iterates,
        report,
    })
}
