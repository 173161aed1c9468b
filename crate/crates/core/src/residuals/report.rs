use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;
use crate::fields::StandardGrid;

/// The residual equations known to the verifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationKind {
    Bfo,
    Sf,
    Eq4d,
    CurvatureLaw,
    Isoparametric,
}

impl EquationKind {
    pub const ALL: [EquationKind; 5] = [
        EquationKind::Bfo,
        EquationKind::Sf,
        EquationKind::Eq4d,
        EquationKind::CurvatureLaw,
        EquationKind::Isoparametric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EquationKind::Bfo => "bfo",
            EquationKind::Sf => "sf",
            EquationKind::Eq4d => "eq4d",
            EquationKind::CurvatureLaw => "curvature_law",
            EquationKind::Isoparametric => "isoparametric",
        }
    }
}

impl fmt::Display for EquationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EquationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.replace('-', "_");
        EquationKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown equation '{s}'")))
    }
}

/// Residual magnitude at one grid point; `error` is set when the point was
/// rejected (the point then does not enter the norms).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResidual {
    pub point: [f64; 4],
    pub value: Option<f64>,
    pub error: Option<String>,
}

/// Per-point and aggregate residual norms for one equation over a grid.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub equation: EquationKind,
    pub field: String,
    pub metric: String,
    pub params: BTreeMap<String, f64>,
    pub grid: StandardGrid,
    pub sup: f64,
    pub rms: f64,
    pub n_points: usize,
    pub n_failed: usize,
    pub points: Vec<PointResidual>,
}

impl ResidualReport {
    pub fn from_points(
        equation: EquationKind,
        field: String,
        metric: String,
        params: BTreeMap<String, f64>,
        grid: StandardGrid,
        points: Vec<PointResidual>,
    ) -> Self {
        let valid: Vec<f64> = points.iter().filter_map(|p| p.value).collect();
        let sup = valid.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let rms = if valid.is_empty() {
            0.0
        } else {
            (valid.iter().map(|v| v * v).sum::<f64>() / valid.len() as f64).sqrt()
        };
        let n_failed = points.len() - valid.len();
        Self {
            equation,
            field,
            metric,
            params,
            n_points: points.len(),
            grid,
            sup,
            rms,
            n_failed,
            points,
        }
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.n_points > self.n_failed && self.sup < tolerance
    }
}
