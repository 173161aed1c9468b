use std::collections::BTreeMap;
use std::fmt::Write as _;

use biharm_core::families::{FamilyParams, FamilyRegistry};
use biharm_core::fields::{EinsteinDatum, Point4, StandardGrid};
use biharm_core::residuals::{
    evaluate_grid, CodomainCurvature, EquationContext, EquationRegistry, ResidualReport,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{emit, sci, to_json, write_file};

pub const KEYS: &[&str] = &[
    "family", "equation", "delta", "center", "alpha", "a", "big_a", "points", "radius",
    "exclusion", "tolerance", "seed", "output", "points_csv",
];

pub const DEFAULT_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Serialize)]
pub struct GridInfo {
    pub sequence: &'static str,
    pub seed: u64,
    pub radius: f64,
    pub exclusion: f64,
    pub n_points: usize,
}

/// The JSON report of `verify`.
#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    pub config: String,
    pub family: String,
    pub field: String,
    pub metric: String,
    pub equation: String,
    pub params: BTreeMap<String, f64>,
    pub grid: GridInfo,
    pub tolerance: f64,
    pub sup: f64,
    pub rms: f64,
    pub sup_sci: String,
    pub rms_sci: String,
    pub n_points: usize,
    pub n_failed: usize,
    pub verdict: &'static str,
}

pub fn parse_center(s: &str) -> Result<Point4, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| format!("'{c}': {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != 4 {
        return Err(format!("expected 4 comma-separated coordinates, got {}", v.len()));
    }
    Ok(Point4::from_column_slice(&v))
}

fn points_csv(report: &ResidualReport) -> String {
    let mut s = String::from("x0,x1,x2,x3,value,error\n");
    for p in &report.points {
        let [x0, x1, x2, x3] = p.point;
        let value = p.value.map(|v| v.to_string()).unwrap_or_default();
        let error = p.error.as_deref().unwrap_or("").replace(',', ";");
        let _ = writeln!(s, "{x0},{x1},{x2},{x3},{value},{error}");
    }
    s
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    cfg.check_keys(KEYS)?;
    let family: String = cfg.required("family")?;
    let equation: String = cfg.parsed_or("equation", "eq4d".to_string())?;
    let defaults = FamilyParams::default();
    let center = match cfg.get("center") {
        Some(c) => parse_center(c).map_err(|e| CliError::Usage(format!("center: {e}")))?,
        None => defaults.center,
    };
    let params = FamilyParams {
        delta: cfg.parsed_or("delta", defaults.delta)?,
        center,
        alpha: cfg.parsed_or("alpha", defaults.alpha)?,
    };
    let entry = FamilyRegistry::standard()
        .build(&family, &params)
        .map_err(CliError::usage)?;
    let eq = EquationRegistry::standard()
        .get(&equation)
        .map_err(CliError::usage)?;

    let a_override: Option<f64> = cfg.parsed("a")?;
    let big_a_override: Option<f64> = cfg.parsed("big_a")?;
    let a = a_override.unwrap_or(entry.a);
    let big_a = big_a_override.or(entry.big_a).ok_or_else(|| {
        CliError::Usage(format!("family '{}' declares no constant A; pass --big-a", entry.name))
    })?;
    let codomain_curvature = match entry.r_h {
        Some(r) if a_override.is_none() && big_a_override.is_none() => CodomainCurvature::Constant(r),
        _ => CodomainCurvature::FromConstants { big_a, a },
    };
    let ctx = EquationContext {
        metric: entry.metric.clone(),
        datum: EinsteinDatum { n: 4, a },
        big_a,
        codomain_curvature,
    };

    let seed = cfg.parsed_or("seed", 0u64)?;
    let grid = StandardGrid::new(
        cfg.parsed_or("points", StandardGrid::DEFAULT_POINTS)?,
        cfg.parsed_or("radius", entry.grid_radius)?,
        cfg.parsed_or("exclusion", StandardGrid::DEFAULT_EXCLUSION)?,
        &entry.singular_set(),
        seed,
    );
    if grid.is_empty() {
        return Err(CliError::Usage("the verification grid is empty".into()));
    }
    let tolerance = cfg.parsed_or("tolerance", DEFAULT_TOLERANCE)?;
    let report = evaluate_grid(eq.as_ref(), entry.field.as_ref(), &ctx, &grid);
    let pass = report.passes(tolerance);

    let json = VerifyReport {
        schema: "biharm.verify/1",
        config: cfg.canonical(),
        family: entry.name.clone(),
        field: report.field.clone(),
        metric: report.metric.clone(),
        equation: report.equation.to_string(),
        params: report.params.clone(),
        grid: GridInfo {
            sequence: grid.sequence,
            seed,
            radius: grid.radius,
            exclusion: grid.exclusion,
            n_points: grid.len(),
        },
        tolerance,
        sup: report.sup,
        rms: report.rms,
        sup_sci: sci(report.sup),
        rms_sci: sci(report.rms),
        n_points: report.n_points,
        n_failed: report.n_failed,
        verdict: if pass { "pass" } else { "fail" },
    };
    emit(cfg.get("output"), &to_json(&json)?)?;
    if let Some(p) = cfg.get("points_csv") {
        write_file(std::path::Path::new(p), &points_csv(&report))?;
    }
    let summary = format!(
        "verify {} {}: sup {} rms {} over {} points ({} failed), tolerance {}",
        entry.name,
        report.equation,
        sci(report.sup),
        sci(report.rms),
        report.n_points,
        report.n_failed,
        sci(tolerance)
    );
    eprintln!("{summary}");
    if pass {
        Ok(())
    } else {
        Err(CliError::AboveTolerance(format!(
            "residual sup {} is not below tolerance {}",
            sci(report.sup),
            sci(tolerance)
        )))
    }
}
