use std::process::ExitCode;

use clap::Parser;
use gsq_cli::error::EXIT_SINGULAR;
use gsq_cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match gsq_cli::run(&cli) {
        Ok(o) if o.singular => {
            eprintln!("gsq: benchmark variance vanished; xi reported as inf");
            ExitCode::from(EXIT_SINGULAR)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gsq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
