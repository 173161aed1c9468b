//! Solvers for `Δλ − aλ = Aλ³` in three symmetry classes: radial on ℝ⁴,
//! axisymmetric on S⁴ and periodic on a flat torus.

mod continuation;
mod linalg;
mod profile;
mod radial;
mod registry;
mod s4;
mod torus;

pub use continuation::{continue_branch, BranchRun, BranchStatus, ContinuationOptions, K_WINDOW};
pub use linalg::{smallest_singular_value, Tridiagonal, TridiagonalLu};
pub use profile::{to_json_lines, BranchPoint, BranchSummary, EquationTag, RadialProfile};
pub use radial::{compare_with_bubble, radial_residual, robin_defect, solve_radial_r4, BubbleComparison};
pub use registry::{InitSpec, ProfileSolver, SolveOutcome, SolveRequest, SolverRegistry};
pub use s4::{
    axisym_mode, bifurcation_points, constant_branch_sigma_min, gradient_energy,
    interpolate_to_double, lyapunov_schmidt_amplitude, polar_grid, s4_axisym_operator,
    s4_jacobian, scan_singular_values, solve_s4, verify_refined, RefinedCheck, S4Init,
    SigmaMinimum,
};
pub use torus::{periodic_grid, solve_torus, torus_residual, TorusIterate, TorusOutcome};

use serde::Serialize;

pub const DEFAULT_RADIAL_N: usize = 1000;
pub const DEFAULT_S4_N: usize = 400;
pub const DEFAULT_TORUS_N: usize = 256;

/// Damped Newton settings shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NewtonOptions {
    /// Stop once the residual sup-norm drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Step halvings allowed per iteration.
    pub max_halvings: usize,
}

impl NewtonOptions {
    pub fn radial() -> Self {
        Self {
            tolerance: 1e-9,
            max_iterations: 50,
            max_halvings: 30,
        }
    }

    pub fn s4() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 50,
            max_halvings: 30,
        }
    }

    pub fn torus() -> Self {
        Self {
            tolerance: 1e-11,
            max_iterations: 50,
            max_halvings: 30,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}
