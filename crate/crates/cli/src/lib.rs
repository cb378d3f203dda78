//! Command-line front end for `bohmz-core`.
//!
//! Exit codes: 0 success, 1 usage or IO error, 2 divergent integral or other
//! domain error, 3 failed verification.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::config::ConfigFile;
use crate::error::{CliError, CliResult};
use crate::output::{emit, RunManifest};

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("bohmz: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> CliResult<()> {
    let file = cli.config.as_deref().map(ConfigFile::load).transpose()?;
    let ctx = commands::Context {
        file: file.as_ref(),
        hbar: cli.hbar,
        kb: cli.kb,
    };
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cli.threads {
            if n == 0 {
                return Err(CliError::usage("--threads must be at least 1"));
            }
            b = b.num_threads(n);
        }
        b.build()
            .map_err(|e| CliError::usage(format!("thread pool: {e}")))?
    };
    let result = pool.install(|| dispatch(&cli.command, &ctx))?;
    if let Some(file) = &file {
        let unused: Vec<&str> = file
            .keys()
            .filter(|k| !result.config.contains_key(*k))
            .collect();
        if !unused.is_empty() {
            return Err(CliError::usage(format!(
                "config keys not used by `{}`: {}",
                result.command,
                unused.join(", ")
            )));
        }
    }
    let manifest = RunManifest::new(result.command, result.config, &result.output);
    emit(&result.output, &manifest, cli.format, cli.out.as_deref())?;
    match result.failure {
        Some(msg) => Err(CliError::VerifyFailed(msg)),
        None => Ok(()),
    }
}

fn dispatch(command: &Command, ctx: &commands::Context<'_>) -> CliResult<commands::CommandResult> {
    match command {
        Command::Fig1(a) => commands::curves::fig1(a, ctx),
        Command::Marginal(a) => commands::curves::marginal(a, ctx),
        Command::Limits(a) => commands::limits::run(a, ctx),
        Command::Bath(a) => commands::bath::run(a, ctx),
        Command::Trajectory(a) => commands::trajectory::run(a, ctx),
        Command::Partition(a) => commands::partition::run(a, ctx),
        Command::Verify(a) => commands::verify::run(a, ctx),
    }
}
