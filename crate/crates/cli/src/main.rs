//! `entanglekit` command-line front end.
//!
//! Exit codes: `classify` returns 0 for Separable, 1 for any entangled
//! verdict and 2 for Undecided; `witness-check` returns 0 when the operator
//! is a witness and 1 otherwise. Every input problem exits with 64.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable overriding the positivity cutoff (default −1e-10).
pub const TOL_ENV: &str = "ENTANGLEKIT_TOL";

const EXIT_INPUT: u8 = 64;
const EXIT_IO: u8 = 74;

#[derive(Debug, Parser)]
#[command(name = "entanglekit", version, about = "Bipartite entanglement analysis")]
pub struct Cli {
    /// Seed for every randomized subroutine.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every separability criterion and print the report as JSON.
    Classify(InputArgs),
    /// Evaluate entanglement measures.
    Measure(MeasureArgs),
    /// Iterate the recurrence purification map and print a CSV trace.
    Distill(DistillArgs),
    /// Scan a three-parameter family of 3x3 simplex states.
    Scan(ScanArgs),
    /// Maximal CHSH value with brute-force confirmed settings.
    Chsh(ChshArgs),
    /// Minimize a Hermitian operator over product states.
    WitnessCheck(InputArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// JSON file with `d1`, `d2` and the row-major matrix as `[re, im]` pairs; `-` reads stdin.
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long)]
    pub input: PathBuf,

    /// Comma-separated measure names; defaults to every measure defined for the dimensions.
    #[arg(long, value_delimiter = ',')]
    pub measures: Vec<String>,
}

#[derive(Debug, Args)]
pub struct DistillArgs {
    /// Initial fidelity with the target Bell state.
    #[arg(long)]
    pub f0: f64,

    #[arg(long, default_value_t = 1)]
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    /// Three vertices on one line of the simplex.
    Line,
    /// Three vertices not on a common line.
    Offline,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, value_enum, default_value_t = FamilyKind::Line)]
    pub family: FamilyKind,

    /// Vertices as `kl` digit pairs, e.g. `10,20,11`.
    #[arg(long, value_delimiter = ',')]
    pub points: Vec<String>,

    /// Grid points per axis.
    #[arg(long, default_value_t = 50)]
    pub grid: usize,

    #[arg(long, default_value_t = -0.2, allow_negative_numbers = true)]
    pub lo: f64,

    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub hi: f64,

    /// Fixed third parameter of the two-dimensional slice.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, conflicts_with = "full")]
    pub gamma: f64,

    /// Scan all three parameters instead of a slice.
    #[arg(long)]
    pub full: bool,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["input", "hidden"]))]
pub struct ChshArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Use the filtered-nonlocality example state with parameters `lambda,alpha*beta`.
    #[arg(long, value_delimiter = ',', num_args = 1, value_names = ["LAMBDA,PRODUCT"])]
    pub hidden: Vec<f64>,

    /// Apply the local filters to the `--hidden` state first.
    #[arg(long, requires = "hidden")]
    pub filtered: bool,

    /// Brute-force grid resolution (polar steps per direction).
    #[arg(long, default_value_t = 8)]
    pub brute_grid: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(commands::Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(commands::Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_IO)
        }
    }
}
