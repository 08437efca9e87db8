use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Shared-tape parallel resampling solver and its verification tools.
///
/// Exit codes: 0 success, 1 error, 2 budget exhausted or colouring violated,
/// 3 tape space infeasible, 4 every tape exhausted.
#[derive(Debug, Parser)]
#[command(name = "resample-forge", version)]
pub struct Cli {
    /// Suppress the human-readable table on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the randomised solver on a problem file.
    Solve(SolveArgs),
    /// Run the deterministic tape-enumeration solver.
    SolveDet(SolveDetArgs),
    /// Seeded trials over a size ladder with tail and mean summaries.
    Stats(StatsArgs),
    /// Check the counting bounds by exhaustive enumeration.
    Oracle(OracleArgs),
    /// Generate a benchmark instance.
    Gen(GenArgs),
    /// Check a colouring against a problem.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    /// Growth radius R; the tape partition is 3R-sparse.
    #[arg(long = "radius", short = 'R', default_value_t = 1)]
    pub big_r: usize,

    /// Give every vertex its own tape stream.
    #[arg(long)]
    pub classic: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, short)]
    pub problem: PathBuf,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub partition: PartitionArgs,

    /// Maximum number of bad-set evaluations.
    #[arg(long, default_value_t = 100_000)]
    pub max_steps: usize,

    /// Where to write the satisfying colouring.
    #[arg(long, short)]
    pub out: Option<PathBuf>,

    /// Where to write the per-round CSV trace.
    #[arg(long)]
    pub trace: Option<PathBuf>,

    /// Re-check the final colouring and fail on a mismatch.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct SolveDetArgs {
    #[arg(long, short)]
    pub problem: PathBuf,

    /// Rounds per tape.
    #[arg(long, short)]
    pub m: usize,

    /// Largest number of tapes to enumerate.
    #[arg(long, default_value_t = 1 << 24)]
    pub tape_cap: u64,

    /// δ in the theoretical constant.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,

    /// d in the theoretical constant; defaults to maxdeg(G).
    #[arg(long)]
    pub d: Option<usize>,

    #[command(flatten)]
    pub partition: PartitionArgs,

    /// Search tapes in parallel (same answer, fewer per-tape statistics).
    #[arg(long)]
    pub parallel: bool,

    #[arg(long, short)]
    pub out: Option<PathBuf>,

    /// Where to write per-tape pass counts.
    #[arg(long)]
    pub tapes_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Torus,
    Ksat,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long, value_enum, default_value_t = Family::Torus)]
    pub family: Family,

    /// Side lengths of the square grids.
    #[arg(long, value_delimiter = ',', default_value = "10,20,50")]
    pub sizes: Vec<usize>,

    #[arg(long, short, default_value_t = 2)]
    pub b: u32,

    /// Clause width for k-SAT.
    #[arg(long, default_value_t = 5)]
    pub k: usize,

    /// Clause radius for k-SAT.
    #[arg(long, default_value_t = 2)]
    pub clause_radius: usize,

    /// Trials per size.
    #[arg(long, default_value_t = 200)]
    pub repeat: u64,

    /// First trial seed; also seeds the k-SAT generator.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub partition: PartitionArgs,

    #[arg(long, default_value_t = 100_000)]
    pub max_steps: usize,

    /// CSV file the per-trial records are appended to.
    #[arg(long)]
    pub results: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 4)]
    pub max_delta: usize,

    #[arg(long, default_value_t = 6)]
    pub max_size: usize,

    /// Largest digraph order in the forest check.
    #[arg(long, default_value_t = 3)]
    pub max_vertices: usize,

    /// Largest edge count (self-loops included) in the forest check.
    #[arg(long, default_value_t = 6)]
    pub max_edges: usize,

    /// Largest forest size in the forest check.
    #[arg(long, default_value_t = 3)]
    pub max_nodes: usize,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub kind: GenKind,

    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenKind {
    /// Not-all-equal on a torus.
    Torus {
        #[arg(long)]
        w: usize,
        #[arg(long)]
        h: usize,
        #[arg(long, short, default_value_t = 2)]
        b: u32,
    },
    /// Random bipartite k-SAT on a grid.
    Ksat {
        #[arg(long)]
        w: usize,
        #[arg(long)]
        h: usize,
        #[arg(long, short, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        clause_radius: usize,
        #[arg(long, default_value_t = 1)]
        per_cell: usize,
        #[arg(long, short, default_value_t = 2)]
        b: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Small random path-like instance.
    Random {
        #[arg(long, short)]
        n: usize,
        #[arg(long, short, default_value_t = 2)]
        b: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Import a DIMACS CNF file.
    Dimacs { input: PathBuf },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, short)]
    pub problem: PathBuf,

    #[arg(long, short)]
    pub colouring: PathBuf,
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(raw) = std::env::var("RESAMPLE_FORGE_THREADS") {
        let threads: usize = raw
            .parse()
            .map_err(|_| anyhow::anyhow!("RESAMPLE_FORGE_THREADS={raw:?} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| {
        let ctx = commands::Context { quiet: cli.quiet };
        match cli.command {
            Command::Solve(args) => commands::solve(&ctx, args),
            Command::SolveDet(args) => commands::solve_det(&ctx, args),
            Command::Stats(args) => commands::stats(&ctx, args),
            Command::Oracle(args) => commands::oracle(&ctx, args),
            Command::Gen(args) => commands::gen(&ctx, args),
            Command::Verify(args) => commands::verify(&ctx, args),
        }
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::Outcome::Error as u8)
        }
    }
}
