//! `kkwave`: run, verify, fit and ablate.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage error, 3 runtime error.

mod ablate;
mod error;
mod fit;
mod manifest;
mod run;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kkwave::SolverConfig;

use error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "kkwave", version, about = "Quasilinear wave / Klein-Gordon tower simulator")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Evolve a configuration and write snapshots, energies and a manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a self-contained verification suite.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Also write the report as JSON lines to DIR/verify.jsonl.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a power law to a decay quantity of a finished run.
    Fit {
        /// Run directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        quantity: String,
        /// Fit window LO:HI in t (default: second half of the run).
        #[arg(long)]
        window: Option<String>,
    },
    /// Compare null_on and null_off runs of one configuration.
    Ablate {
        /// One config (its null_off twin is derived) or two (on, then off).
        #[arg(long, num_args = 1..=2, required = true)]
        config: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Algebra,
    Inequalities,
    Convergence,
    All,
}

/// Parses `path` and applies `KKWAVE_*` overrides from the environment.
pub fn load_config(path: &Path) -> CliResult<SolverConfig> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let mut cfg = SolverConfig::parse(&text)?;
    cfg.apply_env(std::env::vars())?;
    Ok(cfg)
}

fn parse_window(s: &str) -> CliResult<(f64, f64)> {
    let bad = || CliError::Usage(format!("--window expects LO:HI, got `{s}`"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// `Ok(true)` when every check of the verb passed.
fn dispatch(verb: Verb) -> CliResult<bool> {
    match verb {
        Verb::Run { config, out } => run::cmd_run(&config, &out),
        Verb::Verify { suite, out } => verify::cmd_verify(suite, out.as_deref()),
        Verb::Fit { out, quantity, window } => {
            let window = window.as_deref().map(parse_window).transpose()?;
            fit::cmd_fit(&out, &quantity, window)
        }
        Verb::Ablate { config, out } => ablate::cmd_ablate(&config, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli.verb) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("kkwave: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
