use std::process::ExitCode;

use a2g_mimo_cli::args::Cli;
use a2g_mimo_cli::execute;
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command.into_manifest().and_then(|m| execute(&m)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
