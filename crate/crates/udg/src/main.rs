use std::process::ExitCode;

use clap::Parser;
use udg::cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli, &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("udg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
