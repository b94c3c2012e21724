use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "secondorder",
    version,
    about = "Capacity, dispersion and second-order coding rate analysis",
    args_conflicts_with_subcommands = true,
    arg_required_else_help = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// Emit a preset dataset instead of running a subcommand.
    #[arg(long, value_enum)]
    pub recipe: Option<Recipe>,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Solver tolerance (capacity duality gap, nats).
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads for sampling; 0 uses all cores. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Recipe {
    /// Normal approximation against the Gallager bound over R2.
    FigGraph2,
    /// Endpoint dispersions of the four-input example over q1.
    FigGraph1,
    /// Scaled Gallager minimum for the BSC(0.11) over growing n.
    GallagerLimit,
    /// Information-density CLT check for the BSC(0.11).
    CltCheck,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacity and optimal output distribution.
    Capacity(ChannelArgs),
    /// Extreme dispersions over the capacity-achieving inputs.
    Dispersion(ChannelArgs),
    /// Second-order rate at error eps, or error at second-order rate a.
    SecondOrder(SecondOrderArgs),
    /// Additive Markov-noise channel analytics.
    Markov(MarkovArgs),
    /// Power-constrained Gaussian channel analytics.
    Gaussian(GaussianArgs),
    /// Normal approximation against the Gallager bound on an R2 grid.
    GallagerCompare(CompareArgs),
    /// Gallager bound at rate C + R2/sqrt(n) for growing n.
    GallagerLimit(LimitArgs),
    /// Monte-Carlo information-density samples.
    Simulate(SimulateArgs),
    /// Exact small-blocklength checks of the random-coding and converse bounds.
    Oracle(OracleArgs),
    /// The four-input example channel with a segment of achievers.
    Example61(ExampleArgs),
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Channel JSON: {"input_size", "output_size", "matrix"}.
    #[arg(long)]
    pub channel: PathBuf,

    /// Cost JSON: {"costs", "cap"}.
    #[arg(long)]
    pub cost: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SecondOrderArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,

    /// Target error probability.
    #[arg(
        long,
        conflicts_with = "a",
        required_unless_present = "a",
        allow_negative_numbers = true
    )]
    pub eps: Option<f64>,

    /// Second-order rate, nats times sqrt(n).
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MarkovArgs {
    /// Transition JSON: {"d": 2, "transition": [[...], ...]}.
    #[arg(long)]
    pub transition: PathBuf,

    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct GaussianArgs {
    #[arg(long)]
    pub noise: f64,

    #[arg(long)]
    pub signal: f64,

    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Dispersion in nats squared; defaults to V- of --channel.
    #[arg(long, required_unless_present = "channel")]
    pub v: Option<f64>,

    #[arg(long)]
    pub channel: Option<PathBuf>,

    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    pub r2_min: f64,

    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub r2_max: f64,

    #[arg(long, default_value_t = 140)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[arg(long)]
    pub channel: PathBuf,

    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub r2: f64,

    /// Comma-separated blocklengths.
    #[arg(long, value_delimiter = ',', default_values_t = [100u64, 10_000, 1_000_000])]
    pub n: Vec<u64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub channel: PathBuf,

    #[arg(long, default_value_t = 10_000)]
    pub n: usize,

    #[arg(long, default_value_t = 10_000)]
    pub replicas: usize,

    /// `capacity` or a per-letter value in nats.
    #[arg(long, default_value = "capacity")]
    pub center: String,

    /// Also write the summary JSON to this file.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(subcommand)]
    pub kind: OracleKind,
}

#[derive(Debug, Subcommand)]
pub enum OracleKind {
    /// Mean exact random-code error against tail + (N/2) e^{-nR}.
    Direct(DirectArgs),
    /// Exact converse inequality on random codebooks.
    Converse(ConverseArgs),
}

#[derive(Debug, Args)]
pub struct DirectArgs {
    #[arg(long)]
    pub channel: PathBuf,

    #[arg(long, default_value_t = 10)]
    pub n: usize,

    #[arg(long, default_value_t = 4)]
    pub codebook_size: usize,

    /// Decoding threshold, nats per letter.
    #[arg(long, default_value_t = 0.2)]
    pub rate: f64,

    #[arg(long, default_value_t = 200)]
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReferenceKind {
    Uniform,
    Mixture,
}

#[derive(Debug, Args)]
pub struct ConverseArgs {
    #[arg(long)]
    pub channel: PathBuf,

    #[arg(long, default_value_t = 8)]
    pub n: usize,

    #[arg(long, default_value_t = 8)]
    pub codebook_size: usize,

    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,

    #[arg(long, default_value_t = 100)]
    pub trials: usize,

    #[arg(long, value_enum, default_value_t = ReferenceKind::Uniform)]
    pub reference: ReferenceKind,
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    #[arg(long, default_value_t = 0.3)]
    pub q1: f64,

    #[arg(long, default_value_t = 0.2)]
    pub q2: f64,

    /// Emit the q1 sweep as CSV instead of one instance.
    #[arg(long)]
    pub sweep: bool,

    #[arg(long, default_value_t = 17)]
    pub points: usize,

    /// q2 = ratio * q1 along the sweep.
    #[arg(long, default_value_t = 0.5)]
    pub ratio: f64,
}
