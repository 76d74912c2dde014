use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ea_lab::criteria::{FalsifyOptions, DEFAULT_BISECTION_TOL, VERDICT_TOL};

mod commands;
mod numfmt;

/// Entanglement-breaking and entanglement-annihilating channel checks.
#[derive(Parser, Debug)]
#[command(name = "ea-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Locate the EB, 2-LEA and 3-LEA (GHZ, PPT) thresholds of qubit depolarizing noise.
    Thresholds {
        #[arg(long, default_value_t = DEFAULT_BISECTION_TOL)]
        tol: f64,
    },
    /// Tabulate threshold quantities over a lambda grid as CSV.
    Sweep {
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        #[arg(long)]
        step: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search for inputs that E^(xk) leaves entangled.
    Falsify {
        /// Channel spec (JSON).
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        #[arg(long, env = "EA_LAB_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = VERDICT_TOL)]
        tol: f64,
        /// Skip the GHZ/W/maximally entangled probes.
        #[arg(long)]
        no_probes: bool,
        /// Evaluate trials on one thread.
        #[arg(long)]
        serial: bool,
    },
    /// Replay why depolarizing noise at lambda = 1/sqrt(3) is EA on two copies but not EB.
    ReportEaNotEb,
}

const EXIT_INPUT: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Thresholds { tol } => match commands::thresholds(tol) {
            Ok(results) => {
                emit(&commands::thresholds_table(&results));
                ExitCode::SUCCESS
            }
            Err(e) => input_error(e),
        },
        Command::Sweep { lo, hi, step, out } => {
            let grid = match commands::sweep_grid(lo, hi, step) {
                Ok(g) => g,
                Err(msg) => return input_error(msg),
            };
            match commands::write_sweep(&grid, &out) {
                Ok(rows) => {
                    eprintln!("wrote {rows} rows to {}", out.display());
                    ExitCode::SUCCESS
                }
                Err(msg) => input_error(msg),
            }
        }
        Command::Falsify {
            spec,
            k,
            budget,
            seed,
            tol,
            no_probes,
            serial,
        } => {
            if tol.is_nan() || tol < 0.0 {
                return input_error(format!("tol must be nonnegative, got {tol}"));
            }
            let opts = FalsifyOptions {
                probes: !no_probes,
                parallel: !serial,
                tol,
            };
            match commands::falsify(&spec, k, budget, seed, &opts) {
                Ok(run) => {
                    let json = commands::report_json(&run, k);
                    emit(&(serde_json::to_string_pretty(&json).expect("json value") + "\n"));
                    if run.report.counterexample.is_some() {
                        ExitCode::from(1)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => input_error(e),
            }
        }
        Command::ReportEaNotEb => {
            match commands::ea_not_eb_report() {
                Ok(text) => emit(&text),
                Err(e) => eprintln!("error: {e}"),
            }
            ExitCode::SUCCESS
        }
    }
}

/// Writes to stdout, ignoring errors such as a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INPUT)
}
