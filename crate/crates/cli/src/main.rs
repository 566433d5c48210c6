use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod manifest;

/// Exit codes: 0 success or free, 1 definite negative, 2 usage or
/// precondition, 3 resource budget.
#[derive(Debug)]
pub enum CliError {
    Negative(String),
    Usage(String),
    Budget(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Negative(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "shforge", version, about = "Build and check sparse hypergraphs")]
struct Cli {
    /// Worker threads for the verifiers (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Cap on subsets enumerated by naive and full-enumeration checks.
    #[arg(long, global = true, env = "SHFORGE_BUDGET")]
    budget: Option<u128>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Recursive prime-field construction of a G_r(3r-2k, 3)-free r-graph.
    ConstructAlgebraic(AlgebraicArgs),
    /// Lift a seed r-graph to an (r+1)-graph through packed copies of G_t.
    ConstructLift(LiftArgs),
    /// Check that every e edges of a .hg file span more than v vertices.
    Verify(VerifyArgs),
    /// Run the codegree certificate on a free graph.
    Certify(CertifyArgs),
    /// Print density bounds for ranges of r and k.
    Bounds(BoundsArgs),
    /// Exact (or greedy) maximum edge count for tiny parameters.
    Oracle(OracleArgs),
    /// Build a hashing matrix over GF(q) and write it as .phm.
    Matrix(MatrixArgs),
    /// Check the strong 3-perfect hashing property of a .phm file.
    VerifyMatrix(VerifyMatrixArgs),
}

#[derive(Args, Debug)]
pub struct AlgebraicArgs {
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub max_tries: usize,
}

#[derive(Args, Debug)]
pub struct LiftArgs {
    /// Seed graph in .hg format.
    #[arg(long = "seed-graph")]
    pub seed_graph: PathBuf,
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = shforge_core::lift::DEFAULT_MAX_FAILURES)]
    pub max_failures: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub path: PathBuf,
    #[arg(long)]
    pub v: usize,
    #[arg(long)]
    pub e: usize,
    /// Enumerate every e-subset instead of the pruned search.
    #[arg(long)]
    pub naive: bool,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    pub path: PathBuf,
    #[arg(long)]
    pub k: usize,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// A value or inclusive range such as `3..5`.
    #[arg(long, default_value = "3..6")]
    pub r: String,
    #[arg(long, default_value = "2..5")]
    pub k: String,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub v: usize,
    #[arg(long)]
    pub e: usize,
    #[arg(long)]
    pub max_pair: Option<usize>,
    #[arg(long)]
    pub almost_linear: bool,
    /// Run the greedy search instead of the exact one; needs --seed.
    #[arg(long, requires = "seed")]
    pub greedy: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Seconds before the exact search gives up.
    #[arg(long, default_value_t = 60)]
    pub time_limit: u64,
    /// Write the witness family as .hg.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MatrixArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub r: usize,
    /// Explicit evaluation points, comma separated; otherwise searched with --seed.
    #[arg(long, value_delimiter = ',', conflicts_with = "seed")]
    pub vector: Option<Vec<u64>>,
    #[arg(long, required_unless_present = "vector")]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 500)]
    pub max_tries: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct VerifyMatrixArgs {
    pub path: PathBuf,
    /// Enumerate every column triple.
    #[arg(long)]
    pub full: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::ConstructAlgebraic(a) => commands::construct_algebraic(a),
        Command::ConstructLift(a) => commands::construct_lift(a),
        Command::Verify(a) => commands::verify(a, cli.budget),
        Command::Certify(a) => commands::certify(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Matrix(a) => commands::matrix(a),
        Command::VerifyMatrix(a) => commands::verify_matrix(a, cli.budget),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (CliError::Negative(msg) | CliError::Usage(msg) | CliError::Budget(msg)) = &err;
            eprintln!("error: {msg}");
            ExitCode::from(err.code())
        }
    }
}
