//! Profile solvers behind one trait, selected by name.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::profile::RadialProfile;
use super::{
    compare_with_bubble, periodic_grid, solve_radial_r4, solve_s4, solve_torus, NewtonOptions,
    S4Init, DEFAULT_RADIAL_N, DEFAULT_S4_N, DEFAULT_TORUS_N,
};
use crate::error::{Error, Result};

/// Initial profile description, interpreted by each solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitSpec {
    /// S⁴: `√k` (or the given value). Torus: the given value, default 1.
    Constant { value: Option<f64> },
    /// S⁴: `√k + amplitude·φ_ℓ`. Torus: `1 + amplitude·sin(ℓθ)`.
    Mode { ell: usize, amplitude: f64 },
    /// S⁴ only: the Lyapunov–Schmidt guess on the branch from `k_ℓ`.
    Branch { ell: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveRequest {
    pub n: Option<usize>,
    pub tolerance: Option<f64>,
    pub v0: f64,
    pub r_max: f64,
    pub k: f64,
    pub a: f64,
    pub big_a: f64,
    pub init: InitSpec,
}

impl Default for SolveRequest {
    fn default() -> Self {
        Self {
            n: None,
            tolerance: None,
            v0: 2.0,
            r_max: 10.0,
            k: 3.0,
            a: 0.0,
            big_a: 0.0,
            init: InitSpec::Constant { value: None },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveOutcome {
    pub solver: &'static str,
    pub profile: RadialProfile,
    pub converged: bool,
    pub diagnostics: BTreeMap<String, f64>,
    pub note: String,
}

pub trait ProfileSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, req: &SolveRequest) -> Result<SolveOutcome>;
}

struct Radial;
struct S4;
struct Torus;

impl ProfileSolver for Radial {
    fn name(&self) -> &'static str {
        "radial"
    }
    fn solve(&self, req: &SolveRequest) -> Result<SolveOutcome> {
        let mut o = NewtonOptions::radial();
        if let Some(t) = req.tolerance {
            o.tolerance = t;
        }
        let p = solve_radial_r4(req.v0, req.r_max, req.n.unwrap_or(DEFAULT_RADIAL_N), &o)?;
        let c = compare_with_bubble(&p)?;
        let diagnostics = BTreeMap::from([
            ("bubble_delta".to_string(), c.delta),
            ("bubble_sup_error".to_string(), c.sup_error),
            ("robin_defect".to_string(), c.robin_defect),
            ("residual_sup".to_string(), p.residual_sup),
        ]);
        Ok(SolveOutcome {
            solver: self.name(),
            profile: p,
            converged: true,
            diagnostics,
            note: format!("compared with the bubble of δ = 2/v0 = {}", c.delta),
        })
    }
}

impl ProfileSolver for S4 {
    fn name(&self) -> &'static str {
        "s4"
    }
    fn solve(&self, req: &SolveRequest) -> Result<SolveOutcome> {
        let n = req.n.unwrap_or(DEFAULT_S4_N);
        let mut o = NewtonOptions::s4();
        if let Some(t) = req.tolerance {
            o.tolerance = t;
        }
        let init = match req.init {
            InitSpec::Constant { value: None } => S4Init::Constant.profile(req.k, n)?,
            InitSpec::Constant { value: Some(c) } => vec![c; n + 1],
            InitSpec::Mode { ell, amplitude } => S4Init::Mode { ell, amplitude }.profile(req.k, n)?,
            InitSpec::Branch { ell } => S4Init::Branch { ell }.profile(req.k, n)?,
        };
        let bp = solve_s4(req.k, &init, &o)?;
        let diagnostics = BTreeMap::from([
            ("k".to_string(), bp.k),
            ("amplitude".to_string(), bp.amplitude),
            ("gradient_energy".to_string(), bp.gradient_energy),
            ("residual_sup".to_string(), bp.profile.residual_sup),
            ("min_value".to_string(), bp.profile.min_value()),
            ("deviation_from_sqrt_k".to_string(), bp.profile.values.iter().map(|v| (v - req.k.sqrt()).abs()).fold(0.0, f64::max)),
            ("newton_iterations".to_string(), bp.newton_iterations as f64),
        ]);
        Ok(SolveOutcome {
            solver: self.name(),
            profile: bp.profile,
            converged: true,
            diagnostics,
            note: if bp.amplitude > 1e-8 {
                "nonconstant solution".into()
            } else {
                "constant solution u = √k".into()
            },
        })
    }
}

impl ProfileSolver for Torus {
    fn name(&self) -> &'static str {
        "torus"
    }
    fn solve(&self, req: &SolveRequest) -> Result<SolveOutcome> {
        let n = req.n.unwrap_or(DEFAULT_TORUS_N);
        let mut o = NewtonOptions::torus();
        if let Some(t) = req.tolerance {
            o.tolerance = t;
        }
        let grid = periodic_grid(n);
        let init: Vec<f64> = match req.init {
            InitSpec::Constant { value } => vec![value.unwrap_or(1.0); n],
            InitSpec::Mode { ell, amplitude } => grid
                .iter()
                .map(|t| 1.0 + amplitude * (ell as f64 * t).sin())
                .collect(),
            InitSpec::Branch { .. } => {
                return Err(Error::InvalidArgument("the torus solver has no branch seed".into()))
            }
        };
        let out = solve_torus(req.a, req.big_a, &init, &o)?;
        let min_cube = out
            .iterates
            .iter()
            .map(|i| i.integral_cube.abs())
            .fold(f64::INFINITY, f64::min);
        let max_second = out
            .iterates
            .iter()
            .map(|i| i.integral_second.abs())
            .fold(0.0, f64::max);
        let diagnostics = BTreeMap::from([
            ("slack".to_string(), out.slack),
            ("min_abs_integral_cube".to_string(), min_cube),
            ("max_abs_integral_second".to_string(), max_second),
            ("residual_sup".to_string(), out.profile.residual_sup),
            ("iterations".to_string(), (out.iterates.len() - 1) as f64),
        ]);
        Ok(SolveOutcome {
            solver: self.name(),
            profile: out.profile,
            converged: out.converged,
            diagnostics,
            note: out.report,
        })
    }
}

pub struct SolverRegistry {
    solvers: BTreeMap<&'static str, Arc<dyn ProfileSolver>>,
}

impl SolverRegistry {
    pub fn empty() -> Self {
        Self {
            solvers: BTreeMap::new(),
        }
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(Radial));
        r.register(Arc::new(S4));
        r.register(Arc::new(Torus));
        r
    }

    pub fn register(&mut self, s: Arc<dyn ProfileSolver>) {
        self.solvers.insert(s.name(), s);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn ProfileSolver>> {
        self.solvers
            .get(name)
            .cloned()
            .ok_or_else(|| Error::InvalidArgument(format!("unknown solver '{name}'")))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.solvers.keys().copied().collect()
    }
}
