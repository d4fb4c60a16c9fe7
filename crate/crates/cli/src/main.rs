use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eqstress::{Error, TolerancePolicy64};

mod commands;
mod output;

use output::Format;

/// Equilibrium stresses of bar-joint frameworks.
///
/// Graphs are JSON files `{"num_vertices": n, "edges": [[i, j], ...]}` or
/// built-in names: builtin:k4, builtin:w5, builtin:k33, builtin:prism3,
/// builtin:cycleN, builtin:pathN, builtin:kN, builtin:wN, builtin:prismN.
///
/// Exit codes: 0 success, 2 input error (including unmet preconditions
/// such as insufficient connectivity), 3 numerical failure, 4 construction
/// failure after exhausting retries.
#[derive(Debug, Parser)]
#[command(name = "eqstress", version)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Seed for all randomness; recorded in every report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Relative singular value cutoff.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    /// Absolute singular value floor.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub abs_floor: f64,

    /// Trial or sample count (defaults: ggr 50, corank 200, probe-dim 10,
    /// certify-ur retries 10).
    #[arg(long, global = true)]
    pub trials: Option<usize>,

    /// Directory receiving report.json and any stress.csv / framework.json.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl RunConfig {
    pub fn policy(&self) -> eqstress::Result<TolerancePolicy64> {
        TolerancePolicy64::new(self.tol, self.abs_floor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Auto,
    RubberBand,
    Lss,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rigidity rank, Maxwell index, stress space and flags of a framework.
    Analyze {
        /// Framework JSON file.
        framework: PathBuf,
    },
    /// Complete free weights on the edges outside a K_{d+1} to a stress.
    RubberBand {
        graph: String,
        #[arg(long)]
        dim: usize,
        /// JSON array of free weights, or {"clique": [...], "weights": [...]}.
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        weights: Option<PathBuf>,
        /// Draw weights uniformly from [0.5, 2).
        #[arg(long)]
        random: bool,
    },
    /// Orthogonal representation, centering and its (pseudo-)Gram stress.
    Gor {
        graph: String,
        #[arg(long)]
        dim: usize,
        /// Signs of the bilinear form, e.g. +++- (default all +).
        #[arg(long)]
        signature: Option<String>,
    },
    /// Randomized generic global rigidity test.
    Ggr {
        graph: String,
        #[arg(long)]
        dim: usize,
    },
    /// Construct a super stable (hence universally rigid) framework.
    CertifyUr {
        graph: String,
        #[arg(long)]
        dim: usize,
    },
    /// Sampled corank and stressed corank.
    Corank {
        graph: String,
        #[arg(long)]
        dim: usize,
    },
    /// Jacobian rank of the Gstress parameterization.
    ProbeDim {
        graph: String,
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = Route::Auto)]
        route: Route,
    },
    /// Resolve a load on a framework by bar forces.
    Statics {
        /// Framework JSON file.
        framework: PathBuf,
        /// Load JSON file {"forces": [[...], ...]}.
        #[arg(long)]
        load: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_)
        | Error::SpanDeficient { .. }
        | Error::NotAStressMatrix(_)
        | Error::NotAStress { .. }
        | Error::NotConnectedEnough { .. }
        | Error::NotAGstress
        | Error::NotEquilibrium
        | Error::NotGloballyRigid(_) => 2,
        Error::WrongRank { .. }
        | Error::PinningFailed(_)
        | Error::OutsideDomain { .. }
        | Error::NotCentered { .. }
        | Error::NotGeneralPosition(_)
        | Error::Unresolvable { .. } => 3,
        Error::ConstructionFailed { .. } => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = cli.run.policy().and_then(|policy| {
        let run = &cli.run;
        let artifacts = match cli.command {
            Command::Analyze { framework } => commands::analyze(&framework, &policy),
            Command::RubberBand {
                graph,
                dim,
                weights,
                random: _,
            } => commands::rubber_band(&graph, dim, weights.as_deref(), run, &policy),
            Command::Gor { graph, dim, signature } => {
                commands::gor(&graph, dim, signature.as_deref(), run, &policy)
            }
            Command::Ggr { graph, dim } => commands::ggr(&graph, dim, run, &policy),
            Command::CertifyUr { graph, dim } => commands::certify_ur(&graph, dim, run, &policy),
            Command::Corank { graph, dim } => commands::corank(&graph, dim, run, &policy),
            Command::ProbeDim { graph, dim, route } => commands::probe_dim(&graph, dim, route, run, &policy),
            Command::Statics { framework, load } => commands::statics(&framework, &load, &policy),
        }?;
        output::emit(&artifacts, run)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
