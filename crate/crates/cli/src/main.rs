use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

mod commands;
mod report;

use report::Exit;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Pcp(#[from] chanmem::pcp::PcpError),
    #[error(transparent)]
    FreeRot(#[from] chanmem::freerot::FreeRotError),
    #[error(transparent)]
    Reduction(#[from] chanmem::reduction::ReductionError),
    #[error(transparent)]
    Graph(#[from] chanmem::resourcegraph::GraphError),
    #[error(transparent)]
    Exact(#[from] chanmem::exact::ExactError),
}

#[derive(Parser)]
#[command(name = "chanmem", version, about = "Bounded experiments on PCP-encoded channel semigroups")]
struct Cli {
    /// Worker threads for the parallel searches (results do not depend on it).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// Rotation parameters of the free pair.
#[derive(Args, Clone, Debug)]
pub struct PairArgs {
    /// cos θ as an exact rational, e.g. 3/5.
    #[arg(long, allow_hyphen_values = true)]
    pub cos: Option<String>,
    /// sin θ as an exact rational, e.g. 4/5.
    #[arg(long, allow_hyphen_values = true)]
    pub sin: Option<String>,
    /// JSON file with `cos`, `sin`, `axis_a`, `axis_b`.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Only require exact SU(2) entries, not the freeness conditions.
    #[arg(long)]
    pub unchecked: bool,
}

#[derive(Args, Clone, Debug)]
pub struct OutArgs {
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Generic,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Scan all nonempty words up to --depth letters for collisions.
    VerifyFree {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Bounded breadth-first PCP search.
    SolvePcp {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compile an instance into its generator bundle.
    Compile {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value = "1/2")]
        damping: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Search for the target channel in the generated semigroup and
    /// cross-check against the PCP search.
    Membership {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value = "1/2")]
        damping: String,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Generic)]
        mode: ModeArg,
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Explore the orbit of a seed state and query reachability of the
    /// depolarised seed.
    Reach {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value = "1/2")]
        damping: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// `generic`, `mixed`, `basis:K`, or a JSON matrix file.
        #[arg(long, default_value = "generic")]
        seed: String,
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
        /// Graphviz output of the explored graph.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Longest-path monotones on a graph file or an explored orbit.
    Monotones {
        /// Graph JSON (`nodes`, `edges`); alternative to --instance.
        #[arg(long, conflicts_with = "instance")]
        graph: Option<PathBuf>,
        #[arg(long, required_unless_present = "graph")]
        instance: Option<PathBuf>,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value = "1/2")]
        damping: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value = "generic")]
        seed: String,
        /// Node whose table is reported by name; defaults to the first node.
        #[arg(long)]
        base: Option<String>,
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Bounded comparison of two generating sets; the second defaults to
    /// the first plus the target channel.
    Diff {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        against: Option<PathBuf>,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value = "1/2")]
        damping: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn dispatch(command: Command) -> Result<Exit, CliError> {
    match command {
        Command::VerifyFree { pair, depth, budget, out } => commands::run_verify_free(&pair, depth, budget, &out),
        Command::SolvePcp { instance, depth, budget, out } => commands::run_solve_pcp(&instance, depth, budget, &out),
        Command::Compile { instance, pair, damping, out } => commands::run_compile(&instance, &pair, &damping, &out),
        Command::Membership { instance, pair, damping, depth, mode, budget, out } => {
            commands::run_membership(&instance, &pair, &damping, depth, mode, budget, &out)
        }
        Command::Reach { instance, pair, damping, depth, seed, budget, out, dot } => {
            commands::run_reach(&instance, &pair, &damping, depth, &seed, budget, &out, dot.as_deref())
        }
        Command::Monotones { graph, instance, pair, damping, depth, seed, base, budget, out, dot } => {
            let source = match (graph, instance) {
                (Some(g), _) => commands::GraphSource::File(g),
                (None, Some(i)) => commands::GraphSource::Explore { instance: i, pair, damping, depth, seed, budget },
                (None, None) => return Err(CliError::Input("either --graph or --instance is required".into())),
            };
            commands::run_monotones(source, base.as_deref(), &out, dot.as_deref())
        }
        Command::Diff { instance, against, pair, damping, depth, budget, out } => {
            commands::run_diff(&instance, against.as_deref(), &pair, &damping, depth, budget, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.workers {
        Some(0) => Err(CliError::Input("--workers must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command)),
            Err(e) => Err(CliError::Input(e.to_string())),
        },
        None => dispatch(cli.command),
    };
    match result {
        Ok(exit) => ExitCode::from(exit as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Exit::Error as u8)
        }
    }
}
