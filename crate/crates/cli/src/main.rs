mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Emit;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or parameters; exit code 2.
    Usage(String),
    /// Unreadable or unusable data; exit code 1.
    Data(String),
}

impl From<hothand::Error> for CliError {
    fn from(e: hothand::Error) -> Self {
        match e {
            hothand::Error::ConflictingFilter | hothand::Error::InvalidParameter(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Data(other.to_string()),
        }
    }
}

fn write_output(emit: Emit) -> Result<(), CliError> {
    match emit.path {
        Some(path) => std::fs::write(&path, &emit.bytes)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(&emit.bytes)
                .and_then(|()| stdout.flush())
                .map_err(|e| CliError::Data(format!("cannot write to stdout: {e}")))
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let (emit, clean) = match &cli.command {
        Command::Correlogram(a) => (commands::correlogram(a)?, true),
        Command::Fgtime(a) => (commands::fgtime(a)?, true),
        Command::Streakyear(a) => (commands::streakyear(a)?, true),
        Command::Simulate(a) => (commands::simulate(a)?, true),
        Command::Validate(a) => commands::validate_file(a)?,
    };
    write_output(emit)?;
    Ok(if clean {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
