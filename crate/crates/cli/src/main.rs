//! `nkcloud`: landscapes, fitness clouds, limit clouds and the β / β* battery.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nk_cloud::cloud::{DEFAULT_ACCURACY, DEFAULT_BIN_WIDTH};
use nk_cloud::Error;

#[derive(Parser)]
#[command(
    name = "nkcloud",
    version,
    about = "NK fitness landscapes and fitness clouds"
)]
struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a landscape file.
    Gen(GenArgs),
    /// One-step fitness cloud with its β report.
    Cloud(CloudArgs),
    /// Limit fitness cloud after many generations, with its β* report.
    LimitCloud(LimitArgs),
    /// Predicted mean offspring fitness on a grid.
    Analytic(AnalyticArgs),
    /// Full β / β* battery on one or more landscapes.
    ReproduceTable1(TableArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 15)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Landscape file to write.
    #[arg(long)]
    out: PathBuf,
    /// Also enumerate the space and print its maximum fitness.
    #[arg(long)]
    enumerate: bool,
}

/// Where the landscape comes from: a file, or generated from n, k and seed.
#[derive(Args, Clone)]
struct LandscapeArgs {
    /// Landscape file written by `gen`. Overrides --n, --k and --seed.
    #[arg(long)]
    landscape: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 15)]
    k: usize,
    /// Landscape seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Clone)]
struct BinArgs {
    #[arg(long, default_value_t = DEFAULT_BIN_WIDTH)]
    bin_width: f64,
    /// Tolerance for β crossings and β* plateaus.
    #[arg(long, default_value_t = DEFAULT_ACCURACY)]
    accuracy: f64,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HeuristicName {
    RandomWalk,
    Mhc,
    Sa,
    SaCooling,
    Nhc,
}

#[derive(Args, Clone)]
struct HeuristicArgs {
    #[arg(long, value_enum, default_value = "mhc")]
    heuristic: HeuristicName,
    /// Temperature for `sa`.
    #[arg(long)]
    temp: Option<f64>,
    /// Seed of the heuristic's random streams.
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    /// Cooling: starting temperature.
    #[arg(long, default_value_t = 0.10)]
    t_start: f64,
    /// Cooling: factor applied once per epoch.
    #[arg(long, default_value_t = 0.95)]
    t_factor: f64,
    /// Cooling: generations per epoch.
    #[arg(long, default_value_t = 50)]
    epoch_length: usize,
    /// Cooling: schedule length.
    #[arg(long, default_value_t = 2450)]
    cooling_generations: usize,
    /// Cooling: lowest temperature.
    #[arg(long, default_value_t = 0.01)]
    t_floor: f64,
}

#[derive(Args)]
struct CloudArgs {
    #[command(flatten)]
    landscape: LandscapeArgs,
    #[command(flatten)]
    heuristic: HeuristicArgs,
    #[command(flatten)]
    bins: BinArgs,
    /// Cloud over the full one-bit-flip neighborhood instead of a heuristic.
    #[arg(long)]
    hamming: bool,
    /// Offspring samples averaged per genotype (stochastic heuristics).
    #[arg(long, default_value_t = 1)]
    samples: usize,
    /// Also write every (parent, offspring) pair.
    #[arg(long)]
    raw_points: bool,
    /// Also write the predicted mean at every bin center.
    #[arg(long)]
    analytic: bool,
    /// Skip the limit run, so the report has β only.
    #[arg(long)]
    no_limit: bool,
    /// Limit-run length (default: 50 for mhc, the schedule for sa-cooling,
    /// the equilibrium rule otherwise).
    #[arg(long)]
    generations: Option<usize>,
}

#[derive(Args)]
struct LimitArgs {
    #[command(flatten)]
    landscape: LandscapeArgs,
    #[command(flatten)]
    heuristic: HeuristicArgs,
    #[command(flatten)]
    bins: BinArgs,
    /// Run length (default: 50 for mhc, the schedule for sa-cooling,
    /// the equilibrium rule otherwise).
    #[arg(long, conflicts_with = "snapshots")]
    generations: Option<usize>,
    /// Comma-separated generations; one cloud per snapshot.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<usize>>,
    /// Also write the trajectory from this start genotype index.
    #[arg(long)]
    trace_start: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PredictionName {
    Hamming,
    Mhc,
    Sa,
    SaPrinted,
    Nhc,
}

#[derive(Args)]
struct AnalyticArgs {
    #[arg(long, value_enum, default_value = "hamming")]
    heuristic: PredictionName,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 15)]
    k: usize,
    /// Temperature for `sa` and `sa-printed`.
    #[arg(long)]
    temp: Option<f64>,
    /// Grid spacing on [0, 1].
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 15)]
    k: usize,
    /// Single landscape seed (overrides --seeds).
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated landscape seeds.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    seeds: Vec<u64>,
    /// Seed of the heuristics' random streams.
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[command(flatten)]
    bins: BinArgs,
    /// Skip the per-row cloud CSVs.
    #[arg(long)]
    no_clouds: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parameter(_) => 2,
        Error::Capacity(_) => 3,
        Error::Data(_)
        | Error::Format { .. }
        | Error::Quadrature(_)
        | Error::Json(_)
        | Error::Csv(_) => 4,
        Error::Io(_) => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be >= 1");
            return ExitCode::from(2);
        }
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let result = match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Cloud(a) => commands::cloud(a),
        Command::LimitCloud(a) => commands::limit_cloud(a),
        Command::Analytic(a) => commands::analytic(a),
        Command::ReproduceTable1(a) => commands::reproduce_table1(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
