//! `maxvolkit` command-line tool. Reports go to standard output as JSON,
//! diagnostics to standard error.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O or parse error, 3 numerical
//! failure.

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

mod args;
mod commands;
mod stats;

use args::{Cli, Command};

/// Invalid flag combinations detected after parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    match err.downcast_ref::<maxvolkit::Error>() {
        Some(e) if e.is_numerical() => 3,
        Some(maxvolkit::Error::InvalidBounds(_) | maxvolkit::Error::Dimension(_)) => 1,
        _ => 2,
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("MAXVOLKIT_THREADS") else { return Ok(()) };
    let threads: usize = match value.trim().parse() {
        Ok(t) if t > 0 => t,
        _ => return Err(UsageError(format!("MAXVOLKIT_THREADS must be a positive integer, got {value:?}")).into()),
    };
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<Option<String>> {
    configure_threads()?;
    match &cli.command {
        Command::Maxvol(a) => commands::run_maxvol(a),
        Command::Rectmaxvol(a) => commands::run_rect(a),
        Command::Cur(a) => commands::run_cur(a),
        Command::Maxelem(a) => commands::run_maxelem(a),
        Command::Precond(a) => commands::run_precond(a),
        Command::Recsys(a) => commands::run_recsys(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(Some(text)) => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                eprintln!("error: writing report: {e}");
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
