mod args;
mod commands;
mod output;

use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use output::RunManifest;

/// Failure classes and their exit codes: 1 runtime or I/O, 2 usage or
/// validation.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Runtime(format!("{}: {e}", path.display()))
    }

    pub fn runtime(e: impl fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<mori_core::Error> for CliError {
    fn from(e: mori_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

fn parse(argv: Vec<String>) -> Cli {
    Cli::try_parse_from(argv).unwrap_or_else(|e| e.exit())
}

fn run() -> Result<(), CliError> {
    let argv: Vec<String> = std::env::args().collect();
    let mut cli = parse(argv.clone());
    let mut args = argv[1..].to_vec();
    if let Some(path) = cli.manifest.take() {
        if cli.command.is_some() {
            return Err(CliError::Usage("--manifest cannot be combined with a subcommand".into()));
        }
        let saved = RunManifest::load(&path)?;
        let mut replay = vec![argv[0].clone()];
        replay.extend(saved.args.iter().cloned());
        let mut replayed = parse(replay);
        if replayed.manifest.is_some() {
            return Err(CliError::Usage("a manifest may not refer to another manifest".into()));
        }
        replayed.threads = cli.threads.or(replayed.threads);
        cli = replayed;
        args = saved.args;
    }
    let command: Command = cli
        .command
        .clone()
        .ok_or_else(|| CliError::Usage("a subcommand or --manifest is required (see --help)".into()))?;
    let manifest = RunManifest::new(&command, args)?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(threads);
    }
    let pool = pool.build().map_err(CliError::runtime)?;
    let body = pool.install(|| commands::execute(&command, cli.plot_data))?;
    output::emit(&body, command.out(), &manifest)
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
