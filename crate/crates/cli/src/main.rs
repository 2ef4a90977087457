use std::io::{ErrorKind, Write};
use std::process::ExitCode;

use clap::Parser;
use poisson_cli::args::{Cli, Command, CommonArgs};
use poisson_cli::commands;
use poisson_cli::error::{CliError, CliResult};

fn init_threads(common: &CommonArgs) -> CliResult<()> {
    if common.threads == 0 {
        return Err(CliError::Config("--threads must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) -> CliResult<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Solve(a) => {
            init_threads(&a.common)?;
            commands::solve(&a)?;
        }
        Command::Verify(a) => {
            init_threads(&a.common)?;
            let (summary, _, passed) = commands::verify(&a)?;
            emit(&summary)?;
            if !passed {
                return Err(CliError::Failed("one or more cases failed".into()));
            }
        }
        Command::Bench(a) => {
            init_threads(&a.common)?;
            let (csv, _) = commands::bench(&a)?;
            emit(&csv)?;
        }
        Command::DemoFlow(a) => {
            init_threads(&a.common)?;
            let (csv, _) = commands::demo_flow(&a)?;
            if a.common.out.is_none() {
                emit(&csv)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fastpoisson: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
