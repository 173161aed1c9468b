//! Biharmonic conformal maps between four-dimensional space forms.
//!
//! A conformal map `φ` with `φ*h = λ²g` from an Einstein 4-manifold
//! (`Ricci = a·g`) is biharmonic exactly when its conformal factor solves
//! `Δλ − aλ = Aλ³` for some constant `A`. This crate provides:
//!
//! * [`fields`]: scalar fields on ℝ⁴ and the flat / stereographic-sphere
//!   differential operators, with finite-difference cross checks;
//! * [`residuals`]: pointwise residuals of the biharmonicity equations and
//!   the scalar-curvature constraint `6A + 2a/λ² + R_h = 0`;
//! * [`families`]: closed-form solutions (bubbles, classical examples, the
//!   cylinder map) and the Möbius-transformation engine;
//! * [`solver`]: Newton and continuation solvers for the reduced equation
//!   in radial, axisymmetric-S⁴ and periodic settings.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod families;
pub mod fields;
pub mod residuals;
pub mod solver;

pub use error::{Error, Result};
pub use fields::{ConformalMetric, DerivativeMode, EinsteinDatum, Point4, ScalarField};
