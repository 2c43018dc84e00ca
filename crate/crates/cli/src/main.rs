//! `aqcpqc`: run, sweep and compare discretized adiabatic ground-state
//! tracking from the command line.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 invalid input (an error JSON
//! object is printed on stderr), 3 finished but some step was not accepted.

mod commands;
mod config;

use std::process::ExitCode;

use aqcpqc::instances::InstanceKind;
use aqcpqc::Error;
use clap::{Args, Parser, Subcommand};

use crate::config::{CommonArgs, ExperimentConfig, Purpose};

#[derive(Parser)]
#[command(name = "aqcpqc", version, about = "Adiabatic ground-state tracking with parameterized circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One AQC-PQC or VQE run; writes record.json and trace.csv.
    Run(CommonArgs),
    /// AQC-PQC at several step counts; writes sweep.csv.
    Sweep(SweepArgs),
    /// AQC-PQC against both VQE optimizers on generated instances.
    Compare(CompareArgs),
    /// One schedule at several ansatz depths with exact energies per step.
    Expressiveness(ExpressivenessArgs),
    /// Write a generated instance and its descriptor.
    Gen(CommonArgs),
    /// Exact ground energy, degeneracy and gap of an instance.
    Oracle(CommonArgs),
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated step counts.
    #[arg(long, value_delimiter = ',')]
    steps_list: Option<Vec<usize>>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated register sizes.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Comma-separated instance families: maxcut-3reg, maxcut-weighted, numpart, tfi.
    #[arg(long, value_delimiter = ',')]
    kinds: Option<Vec<InstanceKind>>,
    /// Instances per family and size; seeds run from --seed upwards.
    #[arg(long)]
    count: Option<usize>,
}

#[derive(Args)]
struct ExpressivenessArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated ansatz depths.
    #[arg(long, value_delimiter = ',')]
    layer_list: Option<Vec<usize>>,
}

fn error_json(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": { "kind": kind, "message": message } }).to_string()
}

fn is_input_error(e: &Error) -> bool {
    !matches!(e, Error::Io(_))
}

fn dispatch(command: Command) -> aqcpqc::Result<commands::Outcome> {
    fn with<T>(mut c: ExperimentConfig, v: Option<T>, set: impl FnOnce(&mut ExperimentConfig, T)) -> ExperimentConfig {
        if let Some(v) = v {
            set(&mut c, v);
        }
        c
    }
    match command {
        Command::Run(a) => commands::cmd_run(&a.resolve(Purpose::Run)?),
        Command::Sweep(a) => {
            let c = with(a.common.resolve(Purpose::Sweep)?, a.steps_list, |c, v| c.steps_list = v);
            commands::cmd_sweep(&c)
        }
        Command::Compare(a) => {
            let c = a.common.resolve(Purpose::Compare)?;
            let c = with(c, a.sizes, |c, v| c.sizes = v);
            let c = with(c, a.kinds, |c, v| c.kinds = v);
            let c = with(c, a.count, |c, v| c.count = v);
            commands::cmd_compare(&c)
        }
        Command::Expressiveness(a) => {
            let c = with(a.common.resolve(Purpose::Expressiveness)?, a.layer_list, |c, v| c.layer_list = v);
            commands::cmd_expressiveness(&c)
        }
        Command::Gen(a) => commands::cmd_gen(&a.resolve(Purpose::Other)?),
        Command::Oracle(a) => commands::cmd_oracle(&a.resolve(Purpose::Other)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", error_json("invalid-arguments", e.to_string().trim()));
            return ExitCode::from(2);
        }
    };
    match dispatch(cli.command) {
        Ok(outcome) if outcome.degraded => ExitCode::from(3),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(e.kind(), &e.to_string()));
            ExitCode::from(if is_input_error(&e) { 2 } else { 1 })
        }
    }
}
