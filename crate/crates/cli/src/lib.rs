//! Library side of the `poqg` command-line tool: run configuration,
//! subcommands and output assembly.

pub mod args;
pub mod artifacts;
pub mod commands;
pub mod config;
pub mod error;

pub use args::{Cli, Invocation};
pub use artifacts::Artifacts;
pub use commands::{execute, run_to_dir};
pub use config::{parse_config_toml, parse_run_json, CommandKind, RunConfig};
pub use error::{CliError, CliResult, ExitKind};

/// Parse-free entry point used by `main`.
pub fn run(cli: Cli) -> CliResult<()> {
    match cli.into_invocation()? {
        Invocation::Run { config, out } => run_to_dir(&config, &out),
    }
}
