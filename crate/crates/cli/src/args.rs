use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Input-node selection for networked dynamical systems.
#[derive(Debug, Parser)]
#[command(name = "inputsel", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for every random draw [default: 1]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the payload here instead of stdout
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Payload format [default: csv for experiment and simulate, json otherwise]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; 1 runs sequentially
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a graph file
    Generate(GenerateArgs),
    /// Select input nodes for a metric
    Select(SelectArgs),
    /// Evaluate metrics and structural controllability of an input set
    Evaluate(EvaluateArgs),
    /// Simulate consensus dynamics or absorbing walks
    Simulate(SimulateArgs),
    /// Run a batch study from a preset name or a JSON config file
    Experiment(ExperimentArgs),
    /// Run property-verification suites
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    Ring,
    Path,
    Star,
    DirectedRing,
    Geometric,
    Er,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub kind: GraphKind,
    #[arg(long)]
    pub n: usize,
    /// Side of the square for geometric graphs
    #[arg(long, default_value_t = 1000.0)]
    pub width: f64,
    /// Communication radius for geometric graphs
    #[arg(long, default_value_t = 300.0)]
    pub radius: f64,
    /// Edge probability for Erdos-Renyi graphs
    #[arg(long, default_value_t = 0.07)]
    pub q: f64,
    /// Directed Erdos-Renyi graph
    #[arg(long)]
    pub directed: bool,
    /// Redraw random graphs (seed, seed + 1, ...) until connected
    #[arg(long)]
    pub connected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Noise,
    Convergence,
    Kalman,
    CtrbRank,
    GramianH2,
    GramianEnergy,
    MinEnergy,
    Gci,
}

impl Metric {
    pub const ALL: [Metric; 8] = [
        Metric::Noise,
        Metric::Convergence,
        Metric::Kalman,
        Metric::CtrbRank,
        Metric::GramianH2,
        Metric::GramianEnergy,
        Metric::MinEnergy,
        Metric::Gci,
    ];

    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    /// A = -L, inputs actuate their own state
    Actuated,
    /// A = -L_ff, B = -L_fs
    Grounded,
}

/// Metric parameters; each metric reads only its own.
#[derive(Debug, Clone, Args)]
pub struct MetricArgs {
    /// Norm exponent of the convergence bound
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Convergence horizon in time units (walk length t / delta)
    #[arg(long, default_value_t = 2.0)]
    pub t: f64,
    /// Walk step for the convergence bound [default: 0.1 / max L_ii]
    #[arg(long)]
    pub delta: Option<f64>,
    /// Kalman state transition A = expm(-step L)
    #[arg(long, default_value_t = 0.1)]
    pub kalman_step: f64,
    /// Kalman steps before the measured state
    #[arg(long, default_value_t = 2)]
    pub kalman_horizon: usize,
    /// Input model of the controllability metrics
    #[arg(long, value_enum, default_value_t = Variant::Actuated)]
    pub variant: Variant,
    /// Finite Gramian horizon [0, t1] used when A is not Hurwitz and by min-energy
    #[arg(long, default_value_t = 1.0)]
    pub t1: f64,
    /// Regularization of the minimum-energy metric
    #[arg(long, default_value_t = 1e-2)]
    pub epsilon: f64,
    /// Initial state of the minimum-energy metric [default: zeros]
    #[arg(long, value_delimiter = ',')]
    pub x0: Vec<f64>,
    /// Target state of the minimum-energy metric [default: i / (n - 1)]
    #[arg(long, value_delimiter = ',')]
    pub x1: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelectorArg {
    Greedy,
    LazyGreedy,
    Cover,
    MatroidGreedy,
    MaxDegree,
    AvgDegree,
    Random,
    Brute,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Graph file (JSON or edge list) or a named graph such as ring:10
    #[arg(long)]
    pub graph: String,
    #[arg(long, value_enum)]
    pub metric: Metric,
    #[arg(long, value_enum, default_value_t = SelectorArg::Greedy)]
    pub selector: SelectorArg,
    /// Number of inputs
    #[arg(long)]
    pub k: Option<usize>,
    /// Target value for cover selection (>= when maximizing, <= when minimizing)
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub metric_args: MetricArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub graph: String,
    /// Input set, comma separated
    #[arg(long, value_delimiter = ',')]
    pub set: Vec<usize>,
    /// Single metric [default: all]
    #[arg(long, value_enum)]
    pub metric: Option<Metric>,
    #[command(flatten)]
    pub metric_args: MetricArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimModel {
    /// Euler-Maruyama noisy consensus
    Noisy,
    /// Exact-propagator deterministic consensus
    Weighted,
    /// Absorbing walk probabilities g and h
    Walk,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub model: SimModel,
    #[arg(long)]
    pub graph: String,
    /// Input nodes, comma separated
    #[arg(long, value_delimiter = ',')]
    pub inputs: Vec<usize>,
    /// Input states [default: zeros]
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<f64>,
    /// Initial follower states [default: i / n]
    #[arg(long, value_delimiter = ',')]
    pub x0: Vec<f64>,
    /// Step size [default: 0.1 / max L_ii]
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    /// Noise intensity of the noisy model
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Record every n-th step
    #[arg(long, default_value_t = 1)]
    pub record_every: usize,
    /// Walk step length [default: 0.1 / max L_ii]
    #[arg(long)]
    pub delta: Option<f64>,
    /// Walk steps
    #[arg(long, default_value_t = 10)]
    pub tau: u64,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// robustness, convergence, controllability, or a JSON config path
    pub config: String,
    /// Override the node count (geometric widths scale to keep density)
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Aggregate CSV path [default: <output>.aggregate.csv, or stderr]
    #[arg(long)]
    pub aggregate: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// submodularity, matroid, structural, montecarlo, bounds or all
    pub suite: String,
    /// Smoke-test sizes instead of the full sweeps
    #[arg(long)]
    pub quick: bool,
}
