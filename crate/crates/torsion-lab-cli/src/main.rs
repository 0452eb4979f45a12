mod args;
mod commands;
mod fitconfig;
mod output;
mod setup;

use clap::Parser;
use std::fmt;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Core(torsion_lab::Error),
    Io(String),
    Config(String),
    Verification(String),
}

impl CliError {
    pub fn io(e: impl fmt::Display) -> Self {
        CliError::Io(e.to_string())
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Io(_) => "io",
            CliError::Config(_) => "config",
            CliError::Verification(_) => "verification",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) | CliError::Config(m) | CliError::Verification(m) => f.write_str(m),
        }
    }
}

impl From<torsion_lab::Error> for CliError {
    fn from(e: torsion_lab::Error) -> Self {
        CliError::Core(e)
    }
}

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    if let Err(e) = setup::thread_pool() {
        return report(&e);
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}

fn report(e: &CliError) -> ExitCode {
    let doc = serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
    eprintln!("{doc}");
    ExitCode::FAILURE
}
