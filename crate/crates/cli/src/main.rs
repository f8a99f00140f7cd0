use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dkit_cli::commands::{self, exit, ClassifyArgs, Outcome, ShiftChoice};
use dkit_cli::config::RunConfig;

/// Dichotomy checks, bounded solutions and almost-automorphy tests for
/// discrete delayed neutral systems.
#[derive(Parser)]
#[command(name = "dkit", version)]
struct Cli {
    /// Directory for reports whose path is not set explicitly.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate and verify an exponential dichotomy for the homogeneous part.
    Dichotomy { config: PathBuf },
    /// Iterate the fixed-point operator to the bounded solution.
    Solve { config: PathBuf },
    /// Reproduce a built-in example (ex1 or ex2).
    Repro { name: String },
    /// Classify a sampled sequence as periodic, almost periodic or almost automorphic.
    Classify {
        csv: PathBuf,
        /// Bohr ε grid.
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.25")]
        eps: Vec<f64>,
        /// Largest candidate period; defaults to min(200, (len−1)/2).
        #[arg(long)]
        tau_max: Option<i64>,
        /// `fib` or a comma-separated list of positive shifts.
        #[arg(long, default_value = "fib")]
        shifts: ShiftChoice,
        /// Bochner discrepancy tolerance.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Probe window length; defaults to min(61, len/4).
        #[arg(long)]
        probe_len: Option<i64>,
        /// Report path; defaults to `<out-dir>/<stem>.classify.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let load = |path: &PathBuf| RunConfig::load(path);
    match cli.command {
        Command::Dichotomy { config } => match load(&config) {
            Ok(cfg) => commands::cmd_dichotomy(&cfg, &cli.out_dir),
            Err(m) => Ok(Outcome { code: exit::CONFIG, lines: vec![m] }),
        },
        Command::Solve { config } => match load(&config) {
            Ok(cfg) => commands::cmd_solve(&cfg, &cli.out_dir),
            Err(m) => Ok(Outcome { code: exit::CONFIG, lines: vec![m] }),
        },
        Command::Repro { name } => commands::cmd_repro(&name, &cli.out_dir),
        Command::Classify { csv, eps, tau_max, shifts, tol, probe_len, out } => {
            let args = ClassifyArgs { csv, eps, tau_max, shifts, tol, probe_len, out };
            commands::cmd_classify(&args, &cli.out_dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors share the config-error code; help and version exit 0
            let code = if e.use_stderr() { exit::CONFIG } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(outcome) => {
            for line in &outcome.lines {
                if outcome.code == exit::OK {
                    println!("{line}");
                } else {
                    eprintln!("{line}");
                }
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::CONFIG as u8)
        }
    }
}
