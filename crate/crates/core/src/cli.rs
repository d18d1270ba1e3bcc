//! Command-line front end: load an instance, solve it, report.
//!
//! Exit codes: 0 equilibrium found, 1 usage or input error,
//! 2 no equilibrium, 3 time limit, 4 infeasible, 5 numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, ValueEnum};

use crate::algorithms::{Algorithm, Solution, SolverOptions};
use crate::error::Error;
use crate::game::{EquilibriumStatus, GameModel};
use crate::lcp::LcpMethod;
use crate::models::{IpgModel, ResultDocument};
use crate::numerics::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    Cutandplay,
    Fullenum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LcpArg {
    Branching,
    Lemke,
}

/// Computes Nash equilibria of integer programming games.
#[derive(Debug, Parser)]
#[command(name = "rbgame", version)]
struct CliConfig {
    /// Instance file (JSON).
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "cutandplay")]
    algorithm: AlgorithmArg,
    /// Deviation tolerance of the equilibrium check.
    #[arg(long, default_value_t = 3e-4, allow_negative_numbers = true)]
    tolerance: f64,
    /// Time limit in seconds.
    #[arg(long, allow_negative_numbers = true)]
    timelimit: Option<f64>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_enum, default_value = "branching")]
    lcp: LcpArg,
    /// Result file (JSON).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print nothing on standard output.
    #[arg(long)]
    quiet: bool,
}

pub const EXIT_EQUILIBRIUM: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NO_EQUILIBRIUM: i32 = 2;
pub const EXIT_TIME_LIMIT: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;

pub fn exit_code(status: EquilibriumStatus) -> i32 {
    match status {
        EquilibriumStatus::Pne | EquilibriumStatus::Mne => EXIT_EQUILIBRIUM,
        EquilibriumStatus::NoEquilibriumFound => EXIT_NO_EQUILIBRIUM,
        EquilibriumStatus::TimeLimit => EXIT_TIME_LIMIT,
        EquilibriumStatus::Infeasible => EXIT_INFEASIBLE,
        EquilibriumStatus::NumericalFailure => EXIT_NUMERICAL,
    }
}

fn options(cfg: &CliConfig) -> Result<SolverOptions, String> {
    let time_limit = match cfg.timelimit {
        None => None,
        Some(t) if t.is_finite() && t > 0.0 => Some(Duration::from_secs_f64(t)),
        Some(t) => {
            return Err(format!(
                "--timelimit must be a positive number of seconds, got {t}"
            ))
        }
    };
    let opts = SolverOptions {
        algorithm: match cfg.algorithm {
            AlgorithmArg::Cutandplay => Algorithm::CutAndPlay,
            AlgorithmArg::Fullenum => Algorithm::FullEnumeration,
        },
        tolerances: Tolerances {
            deviation_eps: cfg.tolerance,
            ..Tolerances::default()
        },
        time_limit,
        workers: cfg.threads,
        lcp_method: match cfg.lcp {
            LcpArg::Branching => LcpMethod::Branching,
            LcpArg::Lemke => LcpMethod::Lemke,
        },
        seed: cfg.seed,
        ..SolverOptions::default()
    };
    opts.validate().map_err(|e| e.to_string())?;
    Ok(opts)
}

fn report(out: &mut dyn Write, g: &GameModel, s: &Solution) -> std::io::Result<()> {
    let r = &s.result;
    writeln!(out, "status: {}", r.status)?;
    if let Some(msg) = &r.message {
        writeln!(out, "message: {msg}")?;
    }
    let doc = ResultDocument::from_solution(g, s);
    for p in &doc.players {
        writeln!(out, "{}: x = {:?}, payoff = {}", p.name, p.x, p.payoff)?;
    }
    if let Some(all) = &doc.equilibria {
        writeln!(out, "equilibria: {}", all.len())?;
        for (k, e) in all.iter().enumerate() {
            writeln!(out, "  #{} {}", k + 1, e.status)?;
            for p in &e.players {
                writeln!(out, "    {}: x = {:?}, payoff = {}", p.name, p.x, p.payoff)?;
            }
        }
    }
    writeln!(
        out,
        "iterations {}, cuts {}, branches {}, lcp nodes {}, {:.3} ms",
        r.stats.iterations,
        r.stats.cuts,
        r.stats.branches,
        r.stats.lcp_nodes,
        r.stats.wall_time.as_secs_f64() * 1e3
    )
}

/// Runs the command line `argv` (program name first) and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match CliConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_EQUILIBRIUM
            };
        }
    };
    let opts = match options(&cfg) {
        Ok(o) => o,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let mut model = match IpgModel::load(&cfg.instance) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let solution = match model.solve(&opts) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return match e {
                Error::NumericalFailure(_) => EXIT_NUMERICAL,
                Error::Infeasible(_) => EXIT_INFEASIBLE,
                _ => EXIT_USAGE,
            };
        }
    };
    let g = model.finalize().expect("solved models are finalized");
    if let Some(path) = &cfg.output {
        if let Err(e) = ResultDocument::from_solution(g, &solution).save(path) {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    }
    if !cfg.quiet {
        let stdout = std::io::stdout();
        if let Err(e) = report(&mut stdout.lock(), g, &solution) {
            eprintln!("error: {e}");
        }
    }
    exit_code(solution.result.status)
}
