mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Geometric entanglement of symmetric multiqubit states.
#[derive(Parser, Debug)]
#[command(name = "majorana", version, about)]
pub struct Cli {
    /// Cap on worker threads (default: available parallelism). Results do
    /// not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Directory for output files and the run manifest.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// What to print on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Symmetry, Majorana points, closest product points and E_G of a state.
    Analyze(AnalyzeArgs),
    /// Search for the most entangled n-qubit symmetric state.
    Maximize(MaximizeArgs),
    /// Thomson or Tóth configuration for n points.
    Classical(ClassicalArgs),
    /// Entanglement of the classical configurations against reference bounds.
    Bounds(BoundsArgs),
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// State JSON file `{"n": 3, "coeffs": [[re, im], ...]}`.
    pub state_file: Option<PathBuf>,
    /// Use a built-in named state instead of a file.
    #[arg(long, conflicts_with = "state_file")]
    pub name: Option<String>,
    /// Also write the g² grid, `THETAxPHI` samples (e.g. 101x200).
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum AnsatzFlag {
    Positive,
    PositiveSparse,
    Real,
    Complex,
}

#[derive(Args, Debug, Clone)]
pub struct BudgetArgs {
    /// Seed; falls back to MAJ_SEED, then to the built-in default.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random restarts.
    #[arg(long)]
    pub restarts: Option<usize>,
}

#[derive(Args, Debug)]
pub struct MaximizeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = AnsatzFlag::Positive)]
    pub ansatz: AnsatzFlag,
    /// Support for `positive-sparse`, comma separated (e.g. 1,6).
    #[arg(long, value_delimiter = ',')]
    pub support: Vec<usize>,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Thomson,
    Toth,
}

#[derive(Args, Debug)]
pub struct ClassicalArgs {
    #[arg(value_enum)]
    pub problem: Problem,
    #[arg(long)]
    pub n: usize,
    /// Also analyze the points as Majorana points of a state.
    #[arg(long)]
    pub as_state: bool,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected THETAxPHI, got '{s}'"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad theta count '{a}'"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad phi count '{b}'"))?;
    if a < 2 || b < 1 {
        return Err("grid needs at least 2 theta and 1 phi samples".into());
    }
    Ok((a, b))
}

/// How a run ended. Maps onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad input or arguments: exit 2.
    Usage(String),
    /// Anything else that stops the run: exit 1.
    Runtime(String),
}

impl From<majorana::Error> for Failure {
    fn from(e: majorana::Error) -> Self {
        match e {
            majorana::Error::Numeric { .. } | majorana::Error::Io(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("warning: search did not converge; best result reported");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
