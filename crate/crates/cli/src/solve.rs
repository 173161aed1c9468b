use std::collections::BTreeMap;
use std::path::Path;

use biharm_core::solver::{
    continue_branch, scan_singular_values, BranchStatus, ContinuationOptions, InitSpec,
    NewtonOptions, SolveOutcome, SolveRequest, SolverRegistry, DEFAULT_S4_N,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{emit, sci, to_json, write_file, Format};

pub const SOLVE_KEYS: &[&str] = &[
    "solver", "n", "tolerance", "v0", "rmax", "k", "a", "big_a", "init", "ell", "amplitude",
    "value", "output", "format", "seed",
];

pub const SWEEP_KEYS: &[&str] = &[
    "kind", "ell", "k_from", "k_to", "steps", "dk", "n", "tolerance", "output", "profiles_dir",
    "seed",
];

#[derive(Debug, Serialize)]
pub struct SolveReport<'a> {
    pub schema: &'static str,
    pub config: String,
    pub outcome: &'a SolveOutcome,
}

/// Integral counts print as integers, everything else in scientific form.
fn number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e9 {
        format!("{v:.0}")
    } else {
        sci(v)
    }
}

fn init_spec(cfg: &RunConfig) -> CliResult<InitSpec> {
    let kind: String = cfg.parsed_or("init", "constant".to_string())?;
    let ell: usize = cfg.parsed_or("ell", 2)?;
    Ok(match kind.as_str() {
        "constant" => InitSpec::Constant { value: cfg.parsed("value")? },
        "mode" => InitSpec::Mode { ell, amplitude: cfg.parsed_or("amplitude", 0.1)? },
        "branch" => InitSpec::Branch { ell },
        other => {
            return Err(CliError::Usage(format!(
                "unknown init '{other}' (constant, mode or branch)"
            )))
        }
    })
}

pub fn run_solve(cfg: &RunConfig) -> CliResult<()> {
    cfg.check_keys(SOLVE_KEYS)?;
    let name: String = cfg.required("solver")?;
    let registry = SolverRegistry::standard();
    let solver = registry.get(&name).map_err(CliError::usage)?;
    let defaults = SolveRequest::default();
    let req = SolveRequest {
        n: cfg.parsed("n")?,
        tolerance: cfg.parsed("tolerance")?,
        v0: cfg.parsed_or("v0", defaults.v0)?,
        r_max: cfg.parsed_or("rmax", defaults.r_max)?,
        k: cfg.parsed_or("k", defaults.k)?,
        a: cfg.parsed_or("a", defaults.a)?,
        big_a: cfg.parsed_or("big_a", defaults.big_a)?,
        init: init_spec(cfg)?,
    };
    let format: Format = cfg.parsed_or("format", Format::Json)?;
    let outcome = solver.solve(&req).map_err(|e| match e {
        biharm_core::Error::InvalidArgument(_) | biharm_core::Error::Unsupported(_) => {
            CliError::usage(e)
        }
        _ => CliError::solver(e),
    })?;

    let p = &outcome.profile;
    let mut summary = format!(
        "solve {}: converged={} residual={}",
        outcome.solver,
        outcome.converged,
        sci(p.residual_sup)
    );
    if !outcome.diagnostics.contains_key("amplitude") {
        summary.push_str(&format!(" amplitude={}", sci(p.max_value() - p.min_value())));
    }
    for (k, v) in &outcome.diagnostics {
        if k != "residual_sup" {
            summary.push_str(&format!(" {k}={}", number(*v)));
        }
    }
    println!("{summary}");
    if !outcome.note.is_empty() {
        eprintln!("{}", outcome.note);
    }

    if let Some(path) = cfg.get("output") {
        let text = match format {
            Format::Json => to_json(&SolveReport {
                schema: "biharm.solve/1",
                config: cfg.canonical(),
                outcome: &outcome,
            })?,
            Format::Csv => p.to_csv(),
        };
        write_file(Path::new(path), &text)?;
    }
    if !outcome.converged {
        return Err(CliError::Solver(format!(
            "{} did not converge: {}",
            outcome.solver, outcome.note
        )));
    }
    Ok(())
}

/// Trailer record describing the explored window of a branch sweep.
#[derive(Debug, Serialize)]
struct SweepWindow {
    ell: usize,
    k_from: f64,
    k_to: f64,
    explored_k_min: Option<f64>,
    explored_k_max: Option<f64>,
    points: usize,
    status: BranchStatus,
}

pub fn run_sweep(cfg: &RunConfig) -> CliResult<()> {
    cfg.check_keys(SWEEP_KEYS)?;
    let kind: String = cfg.required("kind")?;
    let n: usize = cfg.parsed_or("n", DEFAULT_S4_N)?;
    let mut newton = NewtonOptions::s4();
    if let Some(t) = cfg.parsed("tolerance")? {
        newton.tolerance = t;
    }
    match kind.as_str() {
        "s4-branch" => {
            let opts = ContinuationOptions {
                ell: cfg.parsed_or("ell", 2)?,
                k_from: cfg.required("k_from")?,
                k_to: cfg.required("k_to")?,
                steps: cfg.parsed_or("steps", 20)?,
                n,
                newton,
            };
            let run = continue_branch(&opts).map_err(|e| match e {
                biharm_core::Error::InvalidArgument(_) => CliError::usage(e),
                _ => CliError::solver(e),
            })?;
            let mut lines = String::new();
            for p in &run.points {
                lines.push_str(&serde_json::to_string(&p.summary()).map_err(CliError::solver)?);
                lines.push('\n');
            }
            emit(cfg.get("output"), &lines)?;
            if let Some(dir) = cfg.get("profiles_dir") {
                for (i, p) in run.points.iter().enumerate() {
                    let text = to_json(p)?;
                    write_file(&Path::new(dir).join(format!("point_{i:03}.json")), &text)?;
                }
            }
            let ks = run.points.iter().map(|p| p.k);
            let window = SweepWindow {
                ell: run.ell,
                k_from: run.k_from,
                k_to: run.k_to,
                explored_k_min: ks.clone().reduce(f64::min),
                explored_k_max: ks.reduce(f64::max),
                points: run.points.len(),
                status: run.status.clone(),
            };
            eprintln!("{}", serde_json::to_string(&window).map_err(CliError::solver)?);
            if run.points.is_empty() {
                return Err(CliError::Solver("the sweep produced no branch points".into()));
            }
            Ok(())
        }
        "s4-sigma" => {
            let k_from: f64 = cfg.required("k_from")?;
            let k_to: f64 = cfg.required("k_to")?;
            let dk: f64 = cfg.parsed_or("dk", 0.01)?;
            let ordered = k_to > k_from && dk > 0.0;
            if !ordered {
                return Err(CliError::Usage("need k_from < k_to and dk > 0".into()));
            }
            let mut lines = String::new();
            for m in scan_singular_values(k_from, k_to, dk, n) {
                let rec = BTreeMap::from([("k", m.k), ("sigma_min", m.sigma_min)]);
                lines.push_str(&serde_json::to_string(&rec).map_err(CliError::solver)?);
                lines.push('\n');
            }
            emit(cfg.get("output"), &lines)
        }
        other => Err(CliError::Usage(format!(
            "unknown sweep '{other}' (s4-branch or s4-sigma)"
        ))),
    }
}
