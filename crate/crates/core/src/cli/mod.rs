//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid config or input, 3 non-convergence,
//! 4 verification failure, 1 anything else. Failures also print one JSON
//! error record on stderr.

mod config;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use config::{GameConfig, RunConfig, SolverConfig, SubsidyConfig, SubsidyFamily};
pub use report::{format_sig, Emitted};

use crate::embedding::sion_check;
use crate::error::Error;
use crate::model::StrategyProfile;
use crate::oracle::{brute_maximin, brute_minimax, discretize};
use crate::solver::{multi_start, solve_maximin_fixed_point, verify_both, verify_theorem2};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "zsgame",
    version,
    about = "Equilibria of continuous games through a zero-sum subsidy embedding"
)]
pub struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output format; overrides the config's `format` key.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for random starts; overrides the config's `seed` key.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the maximin fixed-point system for an equilibrium.
    Solve,
    /// Check the Nash/minimax equivalence, at the solved point or at a candidate.
    Verify {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        candidate: Option<Vec<f64>>,
    },
    /// Compare the grid oracle against the continuous optimizers.
    Oracle {
        #[arg(long)]
        resolution: usize,
    },
}

/// Failure of a CLI command, carrying its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub exit_code: i32,
    pub kind: &'static str,
    pub field: Option<String>,
    pub message: String,
    pub details: Value,
}

impl CliError {
    pub fn config(field: Option<String>, message: impl Into<String>) -> Self {
        Self {
            exit_code: EXIT_CONFIG,
            kind: "config",
            field,
            message: message.into(),
            details: Value::Null,
        }
    }

    /// Maps a library error; `section` prefixes spec field names.
    pub fn from_core(err: Error, section: &str) -> Self {
        let message = err.to_string();
        match err {
            Error::BadSpec { field, .. } => Self::config(Some(format!("{section}.{field}")), message),
            Error::BadTolerances(_) => Self::config(Some("tolerances".into()), message),
            Error::NonZeroMinimum { .. } | Error::NonUniqueMinimizer { .. } | Error::VertexHintMismatch { .. } => {
                Self::config(Some("subsidy".into()), message)
            }
            Error::EmptyGame
            | Error::BadInterval { .. }
            | Error::NonFinitePayoff { .. }
            | Error::NegativeOutput { .. }
            | Error::DimensionMismatch { .. }
            | Error::OutOfDomain { .. } => Self::config(Some(section.into()), message),
            Error::GridTooLarge { points, limit } => Self {
                details: json!({ "points": points.to_string(), "limit": limit }),
                ..Self::config(Some("resolution".into()), message)
            },
            Error::BadResolution(_) => Self::config(Some("resolution".into()), message),
            Error::NonConvergence {
                iterations,
                residual,
                last,
            } => Self {
                exit_code: EXIT_NON_CONVERGENCE,
                kind: "non_convergence",
                field: None,
                message,
                details: json!({ "iterations": iterations, "residual": residual, "last": last }),
            },
            Error::NotANash { gaps } => Self {
                exit_code: EXIT_VERIFICATION,
                kind: "not_a_nash",
                field: None,
                message,
                details: json!({ "deviation_gaps": gaps }),
            },
            other => Self {
                exit_code: EXIT_INTERNAL,
                kind: "internal",
                field: None,
                message: other.to_string(),
                details: Value::Null,
            },
        }
    }

    /// Machine-readable record written to stderr.
    pub fn record(&self) -> Value {
        json!({
            "error": self.kind,
            "exit_code": self.exit_code,
            "field": self.field,
            "message": self.message,
            "details": self.details,
        })
    }
}

/// Parses `args` and runs the command, writing the report to `out` and any
/// error record to `err`. Returns the process exit code.
pub fn run_from_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let sink: &mut dyn Write = if code == EXIT_OK { out } else { err };
            let _ = write!(sink, "{e}");
            code
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::config(Some("--config".into()), "a config file is required"))
        .and_then(RunConfig::load)
        .and_then(|mut cfg| {
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            let format = cli.format.or(cfg.format).unwrap_or_default();
            execute(&cli.command, &cfg).map(|emitted| (emitted, format))
        });
    match result {
        Ok((emitted, format)) => {
            let _ = out.write_all(emitted.render(format).as_bytes());
            emitted.exit_code
        }
        Err(e) => {
            let _ = writeln!(err, "{}", e.record());
            e.exit_code
        }
    }
}

pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Emitted, CliError> {
    match command {
        Command::Solve => cmd_solve(cfg),
        Command::Verify { candidate } => cmd_verify(cfg, candidate.as_deref()),
        Command::Oracle { resolution } => cmd_oracle(cfg, *resolution),
    }
}

fn others_of(x: &[f64], player: usize) -> Vec<f64> {
    x.iter()
        .enumerate()
        .filter(|&(j, _)| j != player)
        .map(|(_, v)| *v)
        .collect()
}

fn inputs(cfg: &RunConfig) -> Value {
    serde_json::to_value(cfg).unwrap_or(Value::Null)
}

/// Solves for the equilibrium and reports it with the per-pair Sion gaps.
pub fn cmd_solve(cfg: &RunConfig) -> Result<Emitted, CliError> {
    let started = Instant::now();
    let ext = cfg.build()?;
    let tol = cfg.tolerances;
    let settings = cfg.solver.settings();
    let init = StrategyProfile::new(cfg.solver.init.clone().unwrap_or_else(|| ext.game().midpoint()));
    let solved = solve_maximin_fixed_point(&ext, &init, &tol, settings.damping, settings.max_iter)
        .map_err(|e| CliError::from_core(e, "solver"))?;
    let sion = (0..ext.n_players())
        .map(|i| sion_check(&ext, i, &others_of(&solved.equilibrium_x, i), &tol))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::from_core(e, "solver"))?;
    let starts = if cfg.solver.multi_start > 0 {
        Some(
            multi_start(&ext, cfg.solver.multi_start, cfg.seed, &tol, &settings)
                .map_err(|e| CliError::from_core(e, "solver"))?,
        )
    } else {
        None
    };
    let wall = started.elapsed().as_secs_f64();
    Ok(report::solve(cfg, &inputs(cfg), &solved, &sion, starts.as_ref(), wall))
}

/// Verifies both directions of the equivalence. Without a candidate the
/// equilibrium is solved first; with one, the candidate must be a Nash
/// equilibrium (else exit 4) and the per-pair equalities are checked there.
pub fn cmd_verify(cfg: &RunConfig, candidate: Option<&[f64]>) -> Result<Emitted, CliError> {
    let started = Instant::now();
    let ext = cfg.build()?;
    let tol = cfg.tolerances;
    let verification = match candidate {
        Some(x) => {
            ext.game()
                .check_profile(x)
                .map_err(|e| CliError::config(Some("candidate".into()), e.to_string()))?;
            verify_theorem2(&ext, x, &tol)
        }
        None => verify_both(&ext, &tol, &cfg.solver.settings()),
    }
    .map_err(|e| CliError::from_core(e, "solver"))?;
    let wall = started.elapsed().as_secs_f64();
    Ok(report::verify(cfg, &inputs(cfg), &verification, wall))
}

/// One row of the oracle comparison.
#[derive(Debug, Clone, Serialize)]
pub struct OracleRow {
    pub player: usize,
    pub others: Vec<f64>,
    pub brute_maximin: f64,
    pub brute_minimax: f64,
    pub brute_arg_x: f64,
    pub brute_arg_f: f64,
    pub continuous_maximin: f64,
    pub continuous_minimax: f64,
    pub continuous_arg_x: f64,
    pub continuous_arg_f: f64,
    pub maximin_discrepancy: f64,
    pub minimax_discrepancy: f64,
    pub weak_duality: bool,
}

/// Grid oracle versus continuous max-min / min-max, with the other players
/// fixed at the middle grid point of their axes.
pub fn cmd_oracle(cfg: &RunConfig, resolution: usize) -> Result<Emitted, CliError> {
    let started = Instant::now();
    let ext = cfg.build()?;
    let tol = cfg.tolerances;
    let gg = discretize(&ext, resolution).map_err(|e| CliError::from_core(e, "resolution"))?;
    let mid = (resolution - 1) / 2;
    let n = ext.n_players();
    let mut rows = Vec::with_capacity(n);
    for player in 0..n {
        let others_idx = vec![mid; n - 1];
        let others: Vec<f64> = (0..n).filter(|&j| j != player).map(|j| gg.axis(j)[mid]).collect();
        let core = |e| CliError::from_core(e, "resolution");
        let (kx, lower) = brute_maximin(&gg, player, &others_idx).map_err(core)?;
        let (kf, upper) = brute_minimax(&gg, player, &others_idx).map_err(core)?;
        let sion = sion_check(&ext, player, &others, &tol).map_err(core)?;
        rows.push(OracleRow {
            player,
            others,
            brute_maximin: lower,
            brute_minimax: upper,
            brute_arg_x: gg.axis(player)[kx],
            brute_arg_f: gg.axis(n)[kf],
            continuous_maximin: sion.maximin_value,
            continuous_minimax: sion.minimax_value,
            continuous_arg_x: sion.arg_x,
            continuous_arg_f: sion.arg_f,
            maximin_discrepancy: (lower - sion.maximin_value).abs(),
            minimax_discrepancy: (upper - sion.minimax_value).abs(),
            weak_duality: lower <= upper,
        });
    }
    let wall = started.elapsed().as_secs_f64();
    Ok(report::oracle(cfg, &inputs(cfg), resolution, &rows, wall))
}
