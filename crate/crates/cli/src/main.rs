//! `biharm`: verification reports, Möbius audits and solver runs.
//!
//! Exit codes: 0 success, 1 residual above tolerance, 2 usage error,
//! 3 solver failure.

mod audit;
mod config;
mod error;
mod output;
mod solve;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "biharm", version, about = "Biharmonic conformal maps between 4-D space forms")]
struct Cli {
    /// Plain-text key=value file; flags on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for quasi-random grids and random transforms (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print the merged configuration in canonical form and exit.
    #[arg(long, global = true)]
    dump_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a residual equation for a solution family on a grid.
    Verify(VerifyArgs),
    /// Classify Möbius transformations for the four metric pairings.
    MobiusAudit(AuditArgs),
    /// Solve the reduced equation with a profile solver.
    Solve(SolveArgs),
    /// Parameter sweeps on S⁴.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    family: Option<String>,
    /// bfo, sf, eq4d or curvature_law (default eq4d).
    #[arg(long)]
    equation: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    /// Bubble center as four comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    /// Exponent of power_alpha.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Einstein constant of the domain (overrides the family's).
    #[arg(long = "a", allow_hyphen_values = true)]
    a: Option<f64>,
    /// The constant A of Δλ − aλ = Aλ³ (overrides the family's).
    #[arg(long = "big-a", allow_hyphen_values = true)]
    big_a: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    exclusion: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// JSON report path (stdout when absent).
    #[arg(long)]
    output: Option<String>,
    /// Per-point CSV path.
    #[arg(long)]
    points_csv: Option<String>,
}

#[derive(Debug, Args)]
struct AuditArgs {
    /// e.g. "eps=2 alpha=1.5 tout=0,0,0,0 tin=1,0,0,0 Q=identity"
    #[arg(long, allow_hyphen_values = true)]
    transform: Option<String>,
    /// flat-flat, flat-sphere, sphere-flat or sphere-sphere.
    #[arg(long)]
    pairing: Option<String>,
    #[arg(long)]
    all_pairings: bool,
    /// Audit N random transforms per (pairing, ε) cell.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    output: Option<String>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// radial, s4 or torus.
    solver: Option<String>,
    #[arg(short = 'N', long = "n")]
    n: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    v0: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long = "a", allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long = "big-a", allow_hyphen_values = true)]
    big_a: Option<f64>,
    /// constant, mode or branch.
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    amplitude: Option<f64>,
    #[arg(long)]
    value: Option<f64>,
    #[arg(long)]
    output: Option<String>,
    /// json or csv.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// s4-branch or s4-sigma.
    kind: Option<String>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    k_from: Option<f64>,
    #[arg(long)]
    k_to: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    dk: Option<f64>,
    #[arg(short = 'N', long = "n")]
    n: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// JSON-lines path (stdout when absent).
    #[arg(long)]
    output: Option<String>,
    /// Directory for one JSON profile per branch point.
    #[arg(long)]
    profiles_dir: Option<String>,
}

impl Command {
    fn into_config(self) -> RunConfig {
        match self {
            Command::Verify(v) => {
                let mut c = RunConfig::new("verify");
                c.set_opt("family", v.family);
                c.set_opt("equation", v.equation);
                c.set_opt("delta", v.delta);
                c.set_opt("center", v.center);
                c.set_opt("alpha", v.alpha);
                c.set_opt("a", v.a);
                c.set_opt("big_a", v.big_a);
                c.set_opt("points", v.points);
                c.set_opt("radius", v.radius);
                c.set_opt("exclusion", v.exclusion);
                c.set_opt("tolerance", v.tolerance);
                c.set_opt("output", v.output);
                c.set_opt("points_csv", v.points_csv);
                c
            }
            Command::MobiusAudit(m) => {
                let mut c = RunConfig::new("mobius-audit");
                c.set_opt("transform", m.transform);
                c.set_opt("pairing", m.pairing);
                c.set_opt("all_pairings", m.all_pairings.then_some(true));
                c.set_opt("random", m.random);
                c.set_opt("points", m.points);
                c.set_opt("output", m.output);
                c
            }
            Command::Solve(s) => {
                let mut c = RunConfig::new("solve");
                c.set_opt("solver", s.solver);
                c.set_opt("n", s.n);
                c.set_opt("tolerance", s.tolerance);
                c.set_opt("v0", s.v0);
                c.set_opt("rmax", s.rmax);
                c.set_opt("k", s.k);
                c.set_opt("a", s.a);
                c.set_opt("big_a", s.big_a);
                c.set_opt("init", s.init);
                c.set_opt("ell", s.ell);
                c.set_opt("amplitude", s.amplitude);
                c.set_opt("value", s.value);
                c.set_opt("output", s.output);
                c.set_opt("format", s.format);
                c
            }
            Command::Sweep(s) => {
                let mut c = RunConfig::new("sweep");
                c.set_opt("kind", s.kind);
                c.set_opt("ell", s.ell);
                c.set_opt("k_from", s.k_from);
                c.set_opt("k_to", s.k_to);
                c.set_opt("steps", s.steps);
                c.set_opt("dk", s.dk);
                c.set_opt("n", s.n);
                c.set_opt("tolerance", s.tolerance);
                c.set_opt("output", s.output);
                c.set_opt("profiles_dir", s.profiles_dir);
                c
            }
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let mut cfg = cli.command.into_config();
    cfg.set_opt("seed", cli.seed);
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config file {}: {e}", path.display()))
        })?;
        cfg.fill_from(&text)?;
    }
    if cli.dump_config {
        let text = cfg.canonical();
        if RunConfig::parse(&text)? != cfg {
            return Err(CliError::Usage("configuration does not round-trip".into()));
        }
        print!("{text}");
        return Ok(());
    }
    match cfg.command.as_str() {
        "verify" => verify::run(&cfg),
        "mobius-audit" => audit::run(&cfg),
        "solve" => solve::run_solve(&cfg),
        "sweep" => solve::run_sweep(&cfg),
        other => Err(CliError::Usage(format!("unknown command '{other}'"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("biharm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
