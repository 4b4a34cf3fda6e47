use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use udisc::cli::{
    cmd_gepm, cmd_region, cmd_simulate, cmd_solve, CliError, ProblemFile, SolveOptions,
};
use udisc::solver::SolverConfig;

/// Optimal unambiguous discrimination of linearly independent pure states.
#[derive(Parser)]
#[command(name = "udisc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SolverArgs {
    /// Newton residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Newton iteration cap per start.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Number of random restarts.
    #[arg(long)]
    multistarts: Option<usize>,
    /// RNG seed (falls back to UDISC_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the optimum strategy for a problem file.
    Solve {
        problem: PathBuf,
        /// Cross-check against the sampling oracle with this many samples.
        #[arg(long, value_name = "SAMPLES")]
        verify: Option<usize>,
        /// Include null-vector phases for interior optima.
        #[arg(long)]
        phases: bool,
        /// Include the measurement operators.
        #[arg(long)]
        povm: bool,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Solve the generalized equal-probability measurement problem
    /// (requires `weights` in the problem file).
    Gepm {
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve, build the optimal POVM and simulate the experiment.
    Simulate {
        problem: PathBuf,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export sampled critical-surface points as CSV (3-state problems).
    Region {
        problem: PathBuf,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("UDISC_SEED") {
        Ok(v) => v
            .parse::<u64>()
            .map_err(|_| CliError::Input(format!("UDISC_SEED is not a valid seed: `{v}`"))),
        Err(_) => Ok(0),
    }
}

fn read_problem(path: &PathBuf) -> Result<ProblemFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    ProblemFile::parse(&text)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            std::io::stdout()
                .flush()
                .map_err(|e| CliError::Input(format!("cannot write to stdout: {e}")))
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve {
            problem,
            verify,
            phases,
            povm,
            out,
            solver,
        } => {
            let problem = read_problem(&problem)?;
            let defaults = SolverConfig::default();
            let cfg = SolverConfig {
                tol_newton: solver.tol.unwrap_or(defaults.tol_newton),
                max_iter: solver.max_iter.unwrap_or(defaults.max_iter),
                multistarts: solver.multistarts.unwrap_or(defaults.multistarts),
                rng_seed: resolve_seed(solver.seed)?,
                tol_cert: defaults.tol_cert,
            };
            let report = cmd_solve(
                &problem,
                &SolveOptions {
                    verify,
                    phases,
                    povm,
                },
                &cfg,
            )?;
            emit(&out, &to_json(&report))
        }
        Command::Gepm { problem, out } => {
            let report = cmd_gepm(&read_problem(&problem)?)?;
            emit(&out, &to_json(&report))
        }
        Command::Simulate {
            problem,
            trials,
            seed,
            out,
        } => {
            let report = cmd_simulate(&read_problem(&problem)?, trials, resolve_seed(seed)?)?;
            emit(&out, &to_json(&report))
        }
        Command::Region {
            problem,
            samples,
            seed,
            out,
        } => {
            let problem = read_problem(&problem)?;
            let seed = resolve_seed(seed)?;
            let mut buf = Vec::new();
            cmd_region(&problem, samples, seed, &mut buf)?;
            emit(&out, std::str::from_utf8(&buf).expect("CSV is UTF-8"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("udisc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
