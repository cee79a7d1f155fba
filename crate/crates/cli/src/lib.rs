//! Command-line front end: TOML job files in, CSV/JSON files out.

pub mod config;
pub mod csvio;
pub mod error;
pub mod execute;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use config::{parse_config, Command, JobConfig};
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "kprab", version, about = "k-Prabhakar fractional calculus toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// TOML job file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Number of grid cells (overrides `grid_n`).
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Series relative tolerance (overrides `rel_tol`).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Worker threads: a positive integer or `auto`.
    #[arg(long, env = "KPRAB_THREADS", default_value = "auto")]
    pub threads: String,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Evaluate the k-Mittag-Leffler function, the kernel or the k-gamma function.
    Eval(Common),
    /// Apply an integral or derivative operator to sampled data.
    Apply(Common),
    /// Closed-form Laplace or Sumudu transforms.
    Transform(Common),
    /// Solve the generalized relaxation equation.
    SolveRelaxation(Common),
    /// Solve the space-time fractional diffusion problem.
    SolveDiffusion(Common),
    /// Run the identity verification suite.
    Verify(Common),
}

impl Sub {
    fn split(&self) -> (Command, &Common) {
        match self {
            Sub::Eval(c) => (Command::Eval, c),
            Sub::Apply(c) => (Command::Apply, c),
            Sub::Transform(c) => (Command::Transform, c),
            Sub::SolveRelaxation(c) => (Command::SolveRelaxation, c),
            Sub::SolveDiffusion(c) => (Command::SolveDiffusion, c),
            Sub::Verify(c) => (Command::Verify, c),
        }
    }
}

fn configure_threads(spec: &str) -> CliResult<()> {
    let n =
        match spec.trim() {
            "auto" | "" => return Ok(()),
            s => s.parse::<usize>().ok().filter(|n| *n > 0).ok_or_else(|| {
                CliError::Config(format!("--threads: expected a positive integer or `auto`, got `{s}`"))
            })?,
        };
    // A second call in the same process fails harmlessly; the first pool stays.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Loads the job for `cmd`. Without `--config`, only `verify` has enough
/// defaults to run.
pub fn load_job(cmd: Command, config: Option<&Path>) -> CliResult<JobConfig> {
    let (source, base) = match config {
        Some(p) => (
            fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
            p.parent().map(Path::to_path_buf).unwrap_or_default(),
        ),
        None if cmd == Command::Verify => (String::new(), PathBuf::from(".")),
        None => return Err(CliError::Config(format!("{} needs --config", cmd.name()))),
    };
    parse_config(&source, Some(cmd), &base).map_err(|e| match (e, config) {
        (CliError::Config(m), Some(p)) => CliError::Config(format!("{}: {m}", p.display())),
        (e, _) => e,
    })
}

pub fn run(cli: &Cli) -> CliResult<Vec<PathBuf>> {
    let (cmd, common) = cli.command.split();
    configure_threads(&common.threads)?;
    let mut job = load_job(cmd, common.config.as_deref())?;
    execute::apply_overrides(&mut job, common.grid_n, common.tol)?;
    execute::execute(&job, &common.out)
}
