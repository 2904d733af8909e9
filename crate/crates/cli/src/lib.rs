//! Command-line front-end for `synthbh`.
//!
//! Inputs are headered CSV files. Results are written as CSV (with a trailing
//! `#` summary line) or JSON. Exit status is 0 on success, 2 on invalid input
//! and 3 on I/O failure.

pub mod args;
pub mod bench;
mod commands;
pub mod error;
pub mod io;
pub mod manifest;
pub mod simulate;

pub use args::Cli;
pub use commands::{cmd_outliers, cmd_test};
pub use error::{CliError, Result};

use args::Command;

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Test(args) => cmd_test(args),
        Command::Outliers(args) => cmd_outliers(args),
        Command::Simulate(args) => simulate::cmd_simulate(args),
        Command::Bench(args) => bench::cmd_bench(args),
    }
}
