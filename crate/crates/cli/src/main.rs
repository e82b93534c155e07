// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use bosent_cli::config::TaskKind;
use bosent_cli::error::CliError;
use bosent_cli::{run, RunOptions, OUTPUT_ENV};
use clap::{Args, Parser, Subcommand};

/// Mode entanglement of identical bosons under Lindblad noise.
#[derive(Parser)]
#[command(name = "bosent", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a state and record its negativity.
    Evolve(TaskArgs),
    /// Run the property checks for a configured system.
    Verify(TaskArgs),
    /// Separability times of the worked examples.
    Threshold(TaskArgs),
    /// Large-N decay of two-mode superpositions under dephasing.
    #[command(name = "large-n")]
    LargeN(TaskArgs),
    /// Stationary states of a Liouvillian.
    Stationary(TaskArgs),
}

#[derive(Args)]
struct TaskArgs {
    /// JSON config path, or `paper-examples` for the bundled one.
    #[arg(long)]
    config: String,
    /// Output directory (overrides the environment and the config).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Seed for random states (default: config value, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Enable the slow cross-checks.
    #[arg(long)]
    oracle: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (kind, args) = match cli.command {
        Command::Evolve(a) => (TaskKind::Evolve, a),
        Command::Verify(a) => (TaskKind::Verify, a),
        Command::Threshold(a) => (TaskKind::Threshold, a),
        Command::LargeN(a) => (TaskKind::LargeN, a),
        Command::Stationary(a) => (TaskKind::Stationary, a),
    };
    let opts = RunOptions {
        kind,
        config: args.config,
        output: args.output,
        env_output: std::env::var_os(OUTPUT_ENV).map(PathBuf::from),
        seed: args.seed,
        oracle: args.oracle,
    };
    match run(&opts) {
        Ok(report) => {
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            if report.violations.is_empty() {
                ExitCode::SUCCESS
            } else {
                for v in &report.violations {
                    eprintln!("{}", CliError::Invariant(v.clone()));
                }
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
