//! Command-line front end.
//!
//! Every command reads one JSON [`RunConfig`], resolves its `"auto"` values
//! and writes a report that embeds the resolved configuration. Exit codes:
//! 0 success, 1 configuration error, 2 negative construction or
//! certification, 3 numeric or oracle failure.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use commands::RunOptions;
pub use config::{Context, Resolved, RunConfig};

use crate::error::{Error, Result};
use crate::tractgeom::GMode;

#[derive(Debug, Parser)]
#[command(name = "tractdim", version, about = "Certified dimension bounds for tract repellers")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the construction mode of the configuration.
    #[arg(long, global = true)]
    pub mode: Option<ModeArg>,
    /// Overrides the sampling seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; outputs do not depend on this.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Record wall-clock runtime in the certificate.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Enumerate,
    Tail,
}

impl From<ModeArg> for GMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Enumerate => GMode::Enumerate,
            ModeArg::Tail => GMode::Tail,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the radius, expansion, growth and level-line conditions.
    Lemmas,
    /// Certify that the dimension exceeds one.
    Dim,
    /// Sample the limit set to CSV.
    Sample,
    /// Independent cross-checks.
    Oracle {
        #[command(subcommand)]
        which: OracleCommand,
    },
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum OracleCommand {
    BoxDim,
    BrutePressure,
    Recheck,
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config <path> is required".into()))?;
    let mut config = RunConfig::load(path)?;
    if let Some(m) = cli.mode {
        config.pressure.mode = m.into();
    }
    if let Some(seed) = cli.seed {
        if let Some(s) = config.sampling.as_mut() {
            s.seed = seed;
        }
    }
    Ok(config)
}

pub fn execute(cli: &Cli) -> Result<i32> {
    let config = load(cli)?;
    let ctx = Context::resolve(&config)?;
    let opts = RunOptions {
        out: cli.out.clone().or_else(|| config.output.clone()),
        timing: cli.timing,
    };
    match cli.command {
        Command::Lemmas => commands::lemmas(&ctx, &opts),
        Command::Dim => commands::dim(&ctx, &opts),
        Command::Sample => commands::sample(&ctx, &opts),
        Command::Oracle { which } => match which {
            OracleCommand::BoxDim => commands::oracle_box_dim(&ctx, &opts),
            OracleCommand::BrutePressure => commands::oracle_brute_pressure(&ctx, &opts),
            OracleCommand::Recheck => commands::oracle_recheck(&ctx, &opts),
        },
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = match cli.workers {
        Some(0) => Err(Error::Config("--workers must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))
            .and_then(|pool| pool.install(|| execute(&cli))),
        None => execute(&cli),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
