//! Discretized symmetric solutions and their serialization.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which reduced equation a profile discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "equation", rename_all = "snake_case")]
pub enum EquationTag {
    /// `v″ + (3/r)v′ + 2v³ = 0` on `[0, r_max]`.
    R4Bubble,
    /// `−u″ − 3cot θ u′ + ku − u³ = 0` on `[0, π]`.
    S4Axisym { k: f64 },
    /// `λ″ − aλ − Aλ³ = 0` on the periodic interval `[0, 2π)`.
    Torus1d { a: f64, big_a: f64 },
}

/// A profile on a one-dimensional grid with its residual sup-norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub tag: EquationTag,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub residual_sup: f64,
}

impl RadialProfile {
    pub fn new(tag: EquationTag, grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() || grid.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "profile needs matching grid and values of length >= 3, got {} and {}",
                grid.len(),
                values.len()
            )));
        }
        let mut p = Self {
            tag,
            grid,
            values,
            residual_sup: 0.0,
        };
        p.residual_sup = p.recompute_residual();
        Ok(p)
    }

    pub fn n_intervals(&self) -> usize {
        self.grid.len() - 1
    }

    /// Sup-norm of the discrete residual evaluated from the stored values.
    pub fn recompute_residual(&self) -> f64 {
        let r = match self.tag {
            EquationTag::R4Bubble => super::radial::radial_residual(&self.values, self.grid[1]),
            EquationTag::S4Axisym { k } => super::s4::s4_axisym_operator(&self.values, k),
            EquationTag::Torus1d { a, big_a } => {
                super::torus::torus_residual(&self.values, a, big_a)
            }
        };
        sup(&r)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_positive(&self) -> bool {
        self.min_value() > 0.0
    }

    /// `coordinate,value` rows in shortest round-trip decimal.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("coordinate,value\n");
        for (x, v) in self.grid.iter().zip(&self.values) {
            let _ = writeln!(s, "{x},{v}");
        }
        s
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub(crate) fn sup(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// A point on an axisymmetric solution branch of `−Δu + ku = u³` on S⁴.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub k: f64,
    pub profile: RadialProfile,
    pub arclength: f64,
    /// `sup u − inf u`.
    pub amplitude: f64,
    /// `∫_{S⁴} |∇u|²`.
    pub gradient_energy: f64,
    pub newton_iterations: usize,
}

/// One JSON-lines record per branch point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSummary {
    pub k: f64,
    pub arclength: f64,
    pub amplitude: f64,
    pub gradient_energy: f64,
    pub residual_sup: f64,
    pub min_value: f64,
    pub n: usize,
}

impl BranchPoint {
    pub fn summary(&self) -> BranchSummary {
        BranchSummary {
            k: self.k,
            arclength: self.arclength,
            amplitude: self.amplitude,
            gradient_energy: self.gradient_energy,
            residual_sup: self.profile.residual_sup,
            min_value: self.profile.min_value(),
            n: self.profile.n_intervals(),
        }
    }
}

/// Serializes branch summaries one JSON object per line.
pub fn to_json_lines(points: &[BranchPoint]) -> Result<String> {
    let mut s = String::new();
    for p in points {
        let line = serde_json::to_string(&p.summary()).map_err(|e| Error::Parse(e.to_string()))?;
        s.push_str(&line);
        s.push('\n');
    }
    Ok(s)
}
