//! Library behind the `evroute` binary: every subcommand as a function
//! returning a [`Status`] or a [`CliError`] with its exit code.

pub mod args;
pub mod commands;
pub mod experiment;

pub use args::{Cli, Command};
pub use commands::{CliError, Status};

use std::io::Write;

/// Runs one parsed command. The resolved configuration goes to stderr as
/// one JSON line.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<Status, CliError> {
    eprintln!(
        "{}",
        serde_json::to_string(&cli.command).expect("arguments serialize")
    );
    match &cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Preprocess(a) => commands::cmd_preprocess(a, stdout),
        Command::Query(a) => commands::cmd_query(a),
        Command::Rank(a) => commands::cmd_rank(a),
        Command::Validate(a) => commands::cmd_validate(a, stdout),
        Command::Experiment(a) => experiment::cmd_experiment(a, stdout),
    }
}
