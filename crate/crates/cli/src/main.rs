use std::process::ExitCode;

use clap::Parser;
use synthbh_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("synthbh: error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
