//! `toric-mle`: solvers and exact invariants for scaled toric models.
//!
//! Subcommands: `model gen` builds family models, `mle` runs a solver,
//! `mldegree` and `sigma-test` are exact computations, `bench` runs the
//! solver comparison grid. Machine-readable JSON goes to stdout; exit code
//! 0 on success, 1 on domain errors, 2 on usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser)]
#[command(
    name = "toric-mle",
    version,
    about = "MLE solvers and ML degrees for scaled toric models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Model construction.
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
    /// Compute the maximum likelihood estimate for a model and data vector.
    Mle(MleArgs),
    /// Exact ML degree of a scroll via distinct-root counting.
    Mldegree(MldegreeArgs),
    /// Exact membership test for the degenerate-scaling locus.
    SigmaTest(SigmaArgs),
    /// IPS-versus-homotopy timing grid; emits CSV.
    Bench(BenchArgs),
}

#[derive(Subcommand)]
enum ModelAction {
    /// Generate a family model as JSON.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Scroll,
    Veronese,
    Segre,
    Hierarchical,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Scroll block sizes, e.g. `4,4,4`.
    #[arg(long)]
    n: Option<String>,
    /// Veronese: number of variables.
    #[arg(long)]
    dim: Option<usize>,
    /// Veronese: degree bound.
    #[arg(long)]
    deg: Option<usize>,
    /// Segre grid, e.g. `3x3`.
    #[arg(long)]
    shape: Option<String>,
    /// Hierarchical facets as variable words, e.g. `SB,BH,HL,LS`.
    #[arg(long)]
    facets: Option<String>,
    /// Levels per variable in order of first appearance, e.g. `2,2,2,2`.
    #[arg(long)]
    levels: Option<String>,
    /// `ones`, `binomial`, or a JSON file with a scaling array.
    #[arg(long, default_value = "ones")]
    scaling: String,
    #[arg(long)]
    name: Option<String>,
    /// Output path; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Ips,
    Homotopy,
}

#[derive(Args)]
struct MleArgs {
    #[arg(long, value_enum)]
    solver: Solver,
    #[arg(long)]
    model: PathBuf,
    /// Counts as a JSON array or single-column CSV.
    #[arg(long)]
    data: PathBuf,
    /// Convergence target on the Birch residual.
    #[arg(long, default_value_t = 1e-11)]
    eps: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iter: usize,
    /// Homotopy only: easy scaling (JSON array or model file).
    #[arg(long, required_if_eq("solver", "homotopy"))]
    easy_scaling: Option<PathBuf>,
    /// Homotopy only: write the tracked path as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Pretty-print the JSON output.
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct MldegreeArgs {
    /// Only `scroll` has a closed-form ML degree.
    #[arg(long, default_value = "scroll")]
    family: String,
    /// Scroll block sizes, e.g. `2,2`.
    #[arg(long)]
    n: String,
    /// `ones`, `binomial`, or a JSON file with exact rational entries.
    #[arg(long, default_value = "ones")]
    scaling: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum SigmaMode {
    Hypersurface,
    Ver2,
}

#[derive(Args)]
struct SigmaArgs {
    #[arg(long, value_enum)]
    mode: SigmaMode,
    /// Model file with an exact scaling.
    #[arg(long)]
    model: PathBuf,
    /// Print the evaluated discriminants, not just the verdict.
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Block-count axis, e.g. `5,10,15`.
    #[arg(long, default_value = "5,10,15")]
    d_values: String,
    /// Block-size axis as an inclusive range, e.g. `4..13`.
    #[arg(long, default_value = "4..13")]
    k_range: String,
    #[arg(long, default_value_t = 7)]
    trials: usize,
    #[arg(long, default_value_t = 2016)]
    seed: u64,
    /// IPS convergence target.
    #[arg(long, default_value_t = 1e-11)]
    eps: f64,
    /// Output CSV path; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Model {
            action: ModelAction::Gen(args),
        } => commands::model_gen(args),
        Command::Mle(args) => commands::mle(args),
        Command::Mldegree(args) => commands::mldegree(args),
        Command::SigmaTest(args) => commands::sigma_test(args),
        Command::Bench(args) => commands::bench(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
