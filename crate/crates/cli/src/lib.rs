//! Command-line driver for the `arboreal` crate.
//!
//! Every subcommand is deterministic given its flags: replicas are seeded
//! from the master seed by index, generated in parallel and written in
//! replica order, so the worker count never changes the output.

pub mod args;
pub mod enumerate;
pub mod error;
pub mod params;
pub mod records;
pub mod recursion;
pub mod reports;
pub mod sample;
pub mod stats;
pub mod verify;
pub mod visitors;

pub use args::Cli;
pub use error::{CliError, CliResult, Outcome};

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    use args::Command;
    match &cli.command {
        Command::Recursion(a) => recursion::run(a),
        Command::Enumerate(a) => enumerate::run(a),
        Command::Sample(a) => sample::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Stats(a) => stats::run(a),
    }
}
