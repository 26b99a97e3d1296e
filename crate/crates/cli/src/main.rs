//! `frac`: command-line front end of the fracsob toolkit.
//!
//! Exit status: 0 success, 1 failed verification, 2 usage error (including
//! inputs outside an operation's preconditions), 3 I/O error.

mod args;
mod io;
mod run;

use std::process::ExitCode;

use clap::Parser;

use args::{load_config, Cli, Command, Params};

#[derive(Debug)]
pub struct UsageError(pub String);

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<fracsob::Error> for Failure {
    fn from(e: fracsob::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Whether every check that ran passed.
pub enum Outcome {
    Done,
    Passed,
    Failed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version go to stdout with status 0, the rest is usage
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(Outcome::Done | Outcome::Passed) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("I/O error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(cli: Cli) -> Result<Outcome, Failure> {
    let config = match &cli.config {
        Some(path) => load_config(path)?,
        None => Params::default(),
    };
    match cli.command {
        Command::Compute { op, params } => run::compute(op, &params.merged(config)),
        Command::Norm { params } => run::norm(&params.merged(config)),
        Command::Verify { check, params } => run::verify(check, &params.merged(config)),
        Command::Suite { group, params } => run::suite(&group, &params.merged(config)),
    }
}
