mod cmd;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use output::UsageError;

/// Build structured-scene benchmarks and score detections against them.
#[derive(Parser, Debug)]
#[command(name = "scenebench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a benchmark file.
    Generate(cmd::generate::Args),
    /// Score detection records against a benchmark.
    Score(cmd::score::Args),
    /// Turn failed checks in a score file into enforce pairs.
    Revise(cmd::revise::Args),
    /// Group scores, per-kind relation accuracy or run-to-run stability.
    Analyze(cmd::analyze::Args),
    /// Correlate a metric column with human ratings.
    Correlate(cmd::correlate::Args),
    /// Run the guidance loop on a toy denoiser and print the trajectory.
    GuidanceDemo(cmd::guidance::Args),
}

/// Directory holding a default `compatibility.json`.
pub const CONFIG_DIR_ENV: &str = "SCENEBENCH_CONFIG_DIR";

fn run(cli: Cli) -> anyhow::Result<Vec<PathBuf>> {
    match cli.command {
        Command::Generate(a) => cmd::generate::run(a),
        Command::Score(a) => cmd::score::run(a),
        Command::Revise(a) => cmd::revise::run(a),
        Command::Analyze(a) => cmd::analyze::run(a),
        Command::Correlate(a) => cmd::correlate::run(a),
        Command::GuidanceDemo(a) => cmd::guidance::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(written) => {
            for path in written {
                eprintln!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            // usage errors exit 1, unreadable or invalid data exits 2
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
