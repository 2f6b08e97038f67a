//! Command-line argument definitions.

use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "sgdpaths",
    version,
    about = "Train small MLPs, embed their training trajectories, and simulate coordinate decay"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train networks and write tau/kappa trajectories plus error curves
    Train(TrainArgs),
    /// Run the coordinate-decay stochastic model
    Simulate(SimulateArgs),
    /// Build a distance matrix from a directory of trajectory files
    Embed(EmbedArgs),
    /// Project a distance matrix to low-dimensional coordinates
    Mds(MdsArgs),
    /// Render embedded trajectories as an SVG, colored by epoch
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Directory holding the four MNIST IDX files
    #[arg(long, env = "SGDPATHS_DATA_DIR")]
    pub data_dir: Option<PathBuf>,

    /// Use a built-in synthetic dataset instead of MNIST
    #[arg(long, conflicts_with = "data_dir")]
    pub synthetic: bool,

    /// Number of independently initialized networks
    #[arg(long, default_value_t = 1)]
    pub runs: usize,

    #[arg(long, default_value_t = 20)]
    pub epochs: usize,

    #[arg(long, default_value_t = 0.5)]
    pub lr: f64,

    /// Batch size; 1 reproduces single-sample SGD
    #[arg(long, default_value_t = 1)]
    pub batch: usize,

    #[arg(long, default_value_t = 100)]
    pub hidden: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Deskew images before training (MNIST only)
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub deskew: bool,

    /// Epochs between snapshots
    #[arg(long, default_value_t = 1)]
    pub snapshot_every: usize,

    /// Loss function: sse or cross-entropy
    #[arg(long, default_value = "sse")]
    pub loss: String,

    /// Worker threads for parallel runs (0 = one per core)
    #[arg(long, default_value_t = 0)]
    pub threads: usize,

    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 1000)]
    pub dims: usize,

    #[arg(long, default_value_t = 5)]
    pub replicas: usize,

    #[arg(long, default_value_t = 50_000)]
    pub steps: u64,

    /// Selection law: uniform or zipf
    #[arg(long, default_value = "uniform")]
    pub law: String,

    /// Decay factor in (0,1)
    #[arg(long, default_value_t = 0.9)]
    pub gamma: f64,

    /// Steps between snapshots (default: one per `dims` steps)
    #[arg(long)]
    pub snapshot_every: Option<u64>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for parallel replicas (0 = one per core)
    #[arg(long, default_value_t = 0)]
    pub threads: usize,

    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Run directory produced by `train` or `simulate`
    #[arg(long)]
    pub runs: PathBuf,

    /// Which trajectories to compare: tau or kappa
    #[arg(long, default_value = "tau")]
    pub metric: String,

    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MdsArgs {
    /// Distance matrix CSV produced by `embed`
    #[arg(long)]
    pub dist: PathBuf,

    #[arg(long, default_value_t = 2)]
    pub dims: usize,

    /// classical, or smacof (classical initialization + refinement)
    #[arg(long, default_value = "smacof")]
    pub method: String,

    #[arg(long, default_value_t = sgdpaths::mds::DEFAULT_SMACOF_MAX_ITERS)]
    pub max_iters: usize,

    #[arg(long, default_value_t = sgdpaths::mds::DEFAULT_SMACOF_TOL)]
    pub tol: f64,

    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Coordinates CSV produced by `mds`
    #[arg(long)]
    pub coords: PathBuf,

    /// Output SVG path
    #[arg(long)]
    pub out: PathBuf,

    #[arg(long, default_value_t = 800)]
    pub width: u32,

    #[arg(long, default_value_t = 600)]
    pub height: u32,
}
