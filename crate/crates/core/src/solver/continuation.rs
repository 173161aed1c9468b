//! Pseudo-arclength continuation of axisymmetric S⁴ branches in `k`.

use serde::Serialize;

use super::profile::{sup, BranchPoint};
use super::s4::{branch_point, s4_axisym_operator, s4_jacobian, solve_s4, S4Init};
use super::NewtonOptions;
use crate::error::{Error, Result};

/// Continuation stays inside this window of `k`.
pub const K_WINDOW: (f64, f64) = (2.0, 12.0);

const STEP_SHRINK: f64 = 0.5;
const STEP_GROW: f64 = 1.3;
const FAST_CONVERGENCE: usize = 3;
const MAX_CORRECTOR_ITERATIONS: usize = 15;
const MIN_STEP_FRACTION: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuationOptions {
    pub ell: usize,
    pub k_from: f64,
    pub k_to: f64,
    /// Number of branch points to produce.
    pub steps: usize,
    pub n: usize,
    pub newton: NewtonOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum BranchStatus {
    Completed,
    ReachedTarget,
    LeftWindow,
    StepTooSmall(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchRun {
    pub ell: usize,
    pub k_from: f64,
    pub k_to: f64,
    pub status: BranchStatus,
    pub points: Vec<BranchPoint>,
}

fn dot_w(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / a.len() as f64
}

/// Secant tangent `(Δu, Δk)`, normalized in the RMS norm.
fn secant(u0: &[f64], k0: f64, u1: &[f64], k1: f64) -> (Vec<f64>, f64, f64) {
    let du: Vec<f64> = u1.iter().zip(u0).map(|(a, b)| a - b).collect();
    let dk = k1 - k0;
    let len = (dot_w(&du, &du) + dk * dk).sqrt();
    (du.into_iter().map(|v| v / len).collect(), dk / len, len)
}

/// Newton corrector on `F(u, k) = 0` plus the arclength row
/// `⟨u − u_p, τ_u⟩ + (k − k_p)τ_k = 0`, solved by bordering.
fn correct(
    mut u: Vec<f64>,
    mut k: f64,
    tau_u: &[f64],
    tau_k: f64,
    opts: &NewtonOptions,
) -> Result<(Vec<f64>, f64, usize)> {
    let (u_p, k_p) = (u.clone(), k);
    let m = u.len() as f64;
    for it in 0..MAX_CORRECTOR_ITERATIONS {
        let f = s4_axisym_operator(&u, k);
        let g: f64 = u.iter().zip(&u_p).zip(tau_u).map(|((a, b), t)| (a - b) * t).sum::<f64>() / m
            + (k - k_p) * tau_k;
        if sup(&f) < opts.tolerance && g.abs() < opts.tolerance {
            return Ok((u, k, it));
        }
        let lu = s4_jacobian(&u, k).factor()?;
        let a = lu.solve(&f.iter().map(|v| -v).collect::<Vec<_>>())?;
        let b = lu.solve(&u)?;
        let wa = dot_w(tau_u, &a);
        let wb = dot_w(tau_u, &b);
        let denom = tau_k - wb;
        if denom.abs() < 1e-14 {
            return Err(Error::IllConditioned("bordered corrector is singular".into()));
        }
        let dk = (-g - wa) / denom;
        let du: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - dk * y).collect();
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(&du).map(|(x, d)| x + t * d).collect();
            if trial.iter().all(|v| *v > 0.0) {
                u = trial;
                k += t * dk;
                break;
            }
            t *= 0.5;
            if t < 1e-9 {
                return Err(Error::Positivity {
                    iteration: it,
                    min_value: u.iter().cloned().fold(f64::INFINITY, f64::min),
                });
            }
        }
    }
    Err(Error::Convergence {
        iterations: MAX_CORRECTOR_ITERATIONS,
        residual: sup(&s4_axisym_operator(&u, k)),
    })
}

/// Continues the branch bifurcating from `k_ℓ` starting at `k_from`.
///
/// The first point is a Newton solve seeded by the Lyapunov–Schmidt
/// amplitude; the second is a natural-parameter step; the rest follow by
/// pseudo-arclength with a secant predictor.
pub fn continue_branch(opts: &ContinuationOptions) -> Result<BranchRun> {
    let ContinuationOptions {
        ell,
        k_from,
        k_to,
        steps,
        n,
        newton,
    } = *opts;
    if steps == 0 {
        return Err(Error::InvalidArgument("continuation needs steps >= 1".into()));
    }
    if !(K_WINDOW.0..=K_WINDOW.1).contains(&k_from) {
        return Err(Error::InvalidArgument(format!(
            "k_from = {k_from} lies outside the window [{}, {}]",
            K_WINDOW.0, K_WINDOW.1
        )));
    }
    let nonconstant = |bp: &BranchPoint| bp.amplitude > 1e-6;
    let seed = |k: f64| -> Result<BranchPoint> {
        let init = S4Init::Branch { ell }.profile(k, n)?;
        let bp = solve_s4(k, &init, &newton)
            .map_err(|e| Error::Branch(format!("no branch point at k = {k}: {e}")))?;
        if !nonconstant(&bp) {
            return Err(Error::Branch(format!(
                "Newton at k = {k} fell back onto the constant solution"
            )));
        }
        Ok(bp)
    };
    let first = seed(k_from)?;
    let mut run = BranchRun {
        ell,
        k_from,
        k_to,
        status: BranchStatus::Completed,
        points: vec![first],
    };
    if steps == 1 {
        return Ok(run);
    }
    let dk_nominal = (k_to - k_from) / steps as f64;
    let second = match seed(k_from + dk_nominal) {
        Ok(bp) => bp,
        Err(e) => {
            run.status = BranchStatus::StepTooSmall(e.to_string());
            return Ok(run);
        }
    };
    let (_, _, ds_nominal) = secant(&run.points[0].profile.values, k_from, &second.profile.values, second.k);
    let mut second = second;
    second.arclength = ds_nominal;
    run.points.push(second);

    let mut ds = ds_nominal;
    let direction = (k_to - k_from).signum();
    while run.points.len() < steps {
        let len = run.points.len();
        let (p0, p1) = (&run.points[len - 2], &run.points[len - 1]);
        let (tau_u, tau_k, _) = secant(&p0.profile.values, p0.k, &p1.profile.values, p1.k);
        let u_pred: Vec<f64> = p1.profile.values.iter().zip(&tau_u).map(|(a, t)| a + ds * t).collect();
        let k_pred = p1.k + ds * tau_k;
        match correct(u_pred, k_pred, &tau_u, tau_k, &newton) {
            Ok((u, k, it)) => {
                if !(K_WINDOW.0..=K_WINDOW.1).contains(&k) {
                    run.status = BranchStatus::LeftWindow;
                    break;
                }
                if (k - k_to) * direction > 0.0 {
                    run.status = BranchStatus::ReachedTarget;
                    break;
                }
                let arclength = p1.arclength + ds;
                let bp = branch_point(k, u, arclength, it)?;
                if !nonconstant(&bp) {
                    run.status = BranchStatus::StepTooSmall("branch reached the constant solution".into());
                    run.points.push(bp);
                    break;
                }
                run.points.push(bp);
                if it <= FAST_CONVERGENCE {
                    ds = (ds * STEP_GROW).min(ds_nominal);
                }
            }
            Err(e) => {
                ds *= STEP_SHRINK;
                if ds < MIN_STEP_FRACTION * ds_nominal {
                    run.status = BranchStatus::StepTooSmall(e.to_string());
                    break;
                }
            }
        }
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(k_from: f64, k_to: f64, steps: usize) -> ContinuationOptions {
        ContinuationOptions {
            ell: 2,
            k_from,
            k_to,
            steps,
            n: 200,
            newton: NewtonOptions::s4(),
        }
    }

    #[test]
    fn single_step_gives_one_nonconstant_point() {
        let run = continue_branch(&opts(5.05, 6.0, 1)).unwrap();
        assert_eq!(run.points.len(), 1);
        assert!(run.points[0].amplitude > 1e-3);
    }

    #[test]
    fn branch_grows_away_from_bifurcation() {
        let run = continue_branch(&opts(5.05, 6.0, 8)).unwrap();
        assert_eq!(run.points.len(), 8, "{:?}", run.status);
        for w in run.points.windows(2) {
            assert!(w[1].k > w[0].k);
            assert!(w[1].amplitude > w[0].amplitude);
            assert!(w[1].arclength > w[0].arclength);
        }
        assert!(run.points.iter().all(|p| p.profile.residual_sup < 1e-9 && p.profile.is_positive()));
    }

    #[test]
    fn seed_on_constant_branch_is_a_branch_error() {
        let mut o = opts(3.0, 4.0, 3);
        o.ell = 1;
        assert!(matches!(continue_branch(&o), Err(Error::Branch(_))));
        o.k_from = 20.0;
        assert!(continue_branch(&o).is_err());
    }
}
