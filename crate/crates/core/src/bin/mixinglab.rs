use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mixinglab::app::{execute, Command};

/// Exact toral models and bound evaluators for multiple mixing.
#[derive(Parser)]
#[command(name = "mixinglab", version)]
struct Cli {
    command: Command,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Artifact path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command, &cli.config, cli.out.as_deref()) {
        Ok(outcome) => {
            match (&outcome.stdout_line, &cli.out) {
                (Some(line), _) => println!("{line}"),
                (None, None) => print!("{}", outcome.artifact),
                (None, Some(_)) => {}
            }
            match outcome.failure {
                Some(witness) => {
                    eprintln!("{witness}");
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
