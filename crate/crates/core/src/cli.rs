//! Command-line front end.
//!
//! Exit codes: 0 success, 1 not converged, 2 input error, 3 numerical failure.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::instance::read_instance;
use crate::linalg::Matrix;
use crate::maintenance::ProjectionMaintainer;
use crate::oracle::{vertex_enumerate_solve, OracleStatus};
use crate::solver::{solve, Mode, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NONCONVERGED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "stochastic-ipm", version, about = "Stochastic central path LP solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve an instance file.
    Solve {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        #[arg(long, default_value = "practical")]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long, default_value_t = crate::potential::DEFAULT_OMEGA)]
        omega: f64,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Solve an instance file exactly by vertex enumeration.
    Oracle { file: PathBuf },
    /// Maintenance benchmarks.
    Bench {
        #[command(subcommand)]
        which: Bench,
    },
}

#[derive(Debug, Subcommand)]
enum Bench {
    /// Uniform weight drift `w ← w (1 + 1/√n)`; prints per-step ranks and counters as CSV.
    Drift {
        #[arg(long, default_value_t = 64)]
        n: usize,
        /// Defaults to ⌈√n⌉.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value_t = 0.25)]
        eps_mp: f64,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        a: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Parses `argv` (including the program name) and runs the command, printing
/// to stdout/stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INPUT
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Error> {
    match command {
        Command::Solve {
            file,
            delta,
            mode,
            seed,
            a,
            omega,
            trace,
            max_iters,
            json,
        } => {
            let inst = read_instance(&file)?;
            let config = SolverConfig {
                delta,
                mode,
                seed,
                a,
                omega,
                trace_path: trace,
                max_iters,
                keep_trace: false,
                ..SolverConfig::default()
            };
            let report = solve(&inst.lp, &config)?;
            if json {
                let doc = serde_json::json!({
                    "name": inst.name,
                    "objective": report.objective,
                    "infeasibility_l1": report.primal_infeas_l1,
                    "iterations": report.iterations,
                    "fallbacks": report.fallbacks,
                    "converged": report.converged,
                    "x": report.x_hat,
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("report is valid JSON"))?;
            } else {
                writeln!(out, "objective {:.16e}", report.objective)?;
                writeln!(out, "infeasibility_l1 {:.16e}", report.primal_infeas_l1)?;
                writeln!(out, "iterations {}", report.iterations)?;
                writeln!(out, "fallbacks {}", report.fallbacks)?;
                writeln!(out, "converged {}", report.converged)?;
            }
            Ok(if report.converged { EXIT_OK } else { EXIT_NONCONVERGED })
        }
        Command::Oracle { file } => {
            let inst = read_instance(&file)?;
            let result = vertex_enumerate_solve(&inst.lp)?;
            let status = match result.status {
                OracleStatus::Optimal => "optimal",
                OracleStatus::Infeasible => "infeasible",
                OracleStatus::UnboundedFlagged => "unbounded_flagged",
            };
            writeln!(out, "optimum {:.16e}", result.optimum)?;
            writeln!(out, "status {status}")?;
            let x: Vec<String> = result.argmin.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "argmin {}", x.join(","))?;
            Ok(EXIT_OK)
        }
        Command::Bench {
            which:
                Bench::Drift {
                    n,
                    steps,
                    eps_mp,
                    a,
                    seed,
                },
        } => {
            bench_drift(n, steps.unwrap_or((n as f64).sqrt().ceil() as usize), eps_mp, a, seed, out)?;
            Ok(EXIT_OK)
        }
    }
}

/// Uniform multiplicative drift on a random `⌈n/2⌉ × n` matrix.
pub fn bench_drift(n: usize, steps: usize, eps_mp: f64, a: f64, seed: u64, out: &mut dyn Write) -> Result<(), Error> {
    if n < 2 {
        return Err(Error::Domain(format!("bench drift needs n ≥ 2, got {n}")));
    }
    let d = n.div_ceil(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a_mat = Matrix::new(d, n, (0..d * n).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
    let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let mut mp = ProjectionMaintainer::initialize(&a_mat, &w, eps_mp, a)?;
    let growth = 1.0 + 1.0 / (n as f64).sqrt();
    writeln!(out, "step,r_k,total_rank,outside")?;
    let mut total = 0;
    for step in 1..=steps {
        for wi in w.iter_mut() {
            *wi *= growth;
        }
        mp.update(&w)?;
        total += mp.last_rank();
        writeln!(out, "{step},{},{total},{}", mp.last_rank(), mp.outside().len())?;
    }
    writeln!(out)?;
    write!(out, "{}", mp.counters().to_csv())?;
    Ok(())
}
