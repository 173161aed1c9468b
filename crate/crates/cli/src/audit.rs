use biharm_core::families::{
    audit_cell, classify_mobius, CellAudit, Classification, ClassifyOptions, Epsilon,
    MetricPairing, MobiusTransform, NormalForm,
};
use biharm_core::fields::StandardGrid;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{emit, sci, sci_opt, to_json};

pub const KEYS: &[&str] = &["transform", "pairing", "all_pairings", "random", "points", "seed", "output"];

/// One row of the classification table.
#[derive(Debug, Serialize)]
pub struct AuditRow {
    pub pairing: String,
    pub eps: u8,
    pub verdict: Option<Classification>,
    pub count: usize,
    pub uniform: bool,
    pub bfo_sup_min: f64,
    pub bfo_sup_max: f64,
    pub tension_sup_max: f64,
    pub eq4d_sup: Option<f64>,
    pub normal_form: Option<NormalForm>,
    pub normal_form_error: Option<f64>,
    pub reason: String,
}

#[derive(Debug, Serialize)]
pub struct AuditReport {
    pub schema: &'static str,
    pub config: String,
    pub transform: Option<String>,
    pub seed: u64,
    pub grid_points: usize,
    pub rows: Vec<AuditRow>,
}

fn pairings(cfg: &RunConfig) -> CliResult<Vec<MetricPairing>> {
    let all: bool = cfg.parsed_or("all_pairings", false)?;
    match (cfg.get("pairing"), all) {
        (Some(_), true) => Err(CliError::Usage("give either --pairing or --all-pairings".into())),
        (Some(p), false) => Ok(vec![p.parse().map_err(CliError::usage)?]),
        (None, true) => Ok(MetricPairing::ALL.to_vec()),
        (None, false) => Err(CliError::Usage("missing --pairing (or --all-pairings)".into())),
    }
}

fn row_from_cell(c: CellAudit) -> AuditRow {
    let reason = c
        .verdicts
        .first()
        .map(|v| v.evidence.reason.clone())
        .unwrap_or_default();
    AuditRow {
        uniform: c.classification.is_some(),
        pairing: c.pairing,
        eps: c.eps,
        verdict: c.classification,
        count: c.count,
        bfo_sup_min: c.bfo_sup_min,
        bfo_sup_max: c.bfo_sup_max,
        tension_sup_max: c.tension_sup_max,
        eq4d_sup: c.verdicts.iter().filter_map(|v| v.evidence.eq4d_sup).reduce(f64::max),
        normal_form: None,
        normal_form_error: c.normal_form_error_max,
        reason,
    }
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    cfg.check_keys(KEYS)?;
    let pairings = pairings(cfg)?;
    let seed = cfg.parsed_or("seed", 0u64)?;
    let opts = ClassifyOptions {
        seed,
        grid_points: cfg.parsed_or("points", StandardGrid::DEFAULT_POINTS)?,
        ..ClassifyOptions::default()
    };
    let transform: Option<MobiusTransform> = cfg.parsed("transform")?;
    let random: Option<usize> = cfg.parsed("random")?;

    let rows = match (&transform, random) {
        (Some(t), None) => pairings
            .iter()
            .map(|p| {
                let v = classify_mobius(t, *p, &opts).map_err(CliError::solver)?;
                Ok(AuditRow {
                    pairing: v.pairing,
                    eps: v.eps,
                    verdict: Some(v.classification),
                    count: 1,
                    uniform: true,
                    bfo_sup_min: v.evidence.bfo_sup,
                    bfo_sup_max: v.evidence.bfo_sup,
                    tension_sup_max: v.evidence.tension_sup,
                    eq4d_sup: v.evidence.eq4d_sup,
                    normal_form: v.evidence.normal_form,
                    normal_form_error: v.evidence.normal_form_error,
                    reason: v.evidence.reason,
                })
            })
            .collect::<CliResult<Vec<_>>>()?,
        (None, Some(n)) if n > 0 => {
            let mut rows = Vec::new();
            for (i, (p, eps)) in pairings
                .iter()
                .flat_map(|p| Epsilon::ALL.map(|e| (*p, e)))
                .enumerate()
            {
                let cell = audit_cell(p, eps, n, seed.wrapping_add(i as u64), &opts)
                    .map_err(CliError::solver)?;
                rows.push(row_from_cell(cell));
            }
            rows
        }
        (None, Some(_)) => return Err(CliError::Usage("--random needs a positive count".into())),
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("give either --transform or --random, not both".into()))
        }
        (None, None) => return Err(CliError::Usage("missing --transform or --random N".into())),
    };

    eprintln!(
        "{:<14} {:>3} {:>5} {:<18} {:>9} {:>9} {:>9} {:>9}",
        "pairing", "eps", "count", "verdict", "bfo_min", "bfo_max", "tension", "nf_error"
    );
    for r in &rows {
        eprintln!(
            "{:<14} {:>3} {:>5} {:<18} {:>9} {:>9} {:>9} {:>9}",
            r.pairing,
            r.eps,
            r.count,
            r.verdict.map_or_else(|| "MIXED".to_string(), |v| v.to_string()),
            sci(r.bfo_sup_min),
            sci(r.bfo_sup_max),
            sci(r.tension_sup_max),
            sci_opt(r.normal_form_error)
        );
    }
    let mixed = rows.iter().filter(|r| !r.uniform).count();
    let report = AuditReport {
        schema: "biharm.mobius-audit/1",
        config: cfg.canonical(),
        transform: transform.map(|t| t.to_string()),
        seed,
        grid_points: opts.grid_points,
        rows,
    };
    emit(cfg.get("output"), &to_json(&report)?)?;
    if mixed > 0 {
        return Err(CliError::AboveTolerance(format!("{mixed} audit cells have mixed verdicts")));
    }
    Ok(())
}
