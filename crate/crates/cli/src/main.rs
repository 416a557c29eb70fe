//! `gdam`: run the solvers, generate and localize sensor networks, and run
//! the benchmark suites. Every command writes its outputs and a
//! `manifest.json` into the output directory.

mod commands;
mod config;
mod error;
mod manifest;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{bench, snl, solve, trace2d};
use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "gdam", version, args_override_self = true)]
#[command(about = "Interior-point optimization along the GDAM direction field")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "GDAM_OUT_DIR", default_value = "gdam-out")]
    out: PathBuf,
    /// Leave the generation-time comment out of SVG files.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Trace a 2-D trajectory to CSV and SVG.
    Trace2d(trace2d::Trace2dArgs),
    /// Solve a shipped problem or a QP file.
    Solve(solve::SolveArgs),
    /// Sensor network localization.
    Snl {
        #[command(subcommand)]
        command: snl::SnlCommand,
    },
    /// Run a benchmark suite; exits with 1 if any case misses its threshold.
    Bench(bench::BenchArgs),
    /// Run the command recorded in a manifest again.
    Replay {
        manifest: PathBuf,
        /// Write into this directory instead of the recorded one.
        #[arg(long)]
        into: Option<PathBuf>,
    },
}

/// What every command needs besides its own arguments.
pub struct Ctx {
    pub argv: Vec<String>,
    pub out: PathBuf,
    pub no_timestamp: bool,
}

impl Ctx {
    pub fn stamp(&self) -> Option<u64> {
        if self.no_timestamp {
            return None;
        }
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs())
    }
}

fn dispatch(cli: Cli, argv: Vec<String>) -> CliResult<()> {
    let ctx = Ctx {
        argv,
        out: cli.out,
        no_timestamp: cli.no_timestamp,
    };
    match cli.command {
        Command::Trace2d(a) => trace2d::run(&ctx, &a),
        Command::Solve(a) => solve::run(&ctx, &a),
        Command::Snl { command } => snl::run(&ctx, &command),
        Command::Bench(a) => bench::run(&ctx, &a),
        Command::Replay { manifest, into } => {
            let m = manifest::load_manifest(&manifest)?;
            let mut argv = m.argv.clone();
            argv.push("--out".into());
            argv.push(into.map_or(m.out_dir.clone(), |d| d.display().to_string()));
            let cli = Cli::try_parse_from(std::iter::once("gdam".to_string()).chain(argv.iter().cloned()))
                .map_err(|e| CliError::Usage(format!("recorded arguments: {e}")))?;
            if matches!(cli.command, Command::Replay { .. }) {
                return Err(CliError::Usage("a replay manifest cannot replay".into()));
            }
            dispatch(cli, argv)
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gdam: {e}");
            e.exit_code()
        }
    }
}
