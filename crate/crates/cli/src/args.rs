use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "mori", version, about = "Simulate and verify the Mori preferential-attachment process")]
pub struct Cli {
    /// Worker threads for Monte Carlo ensembles.
    #[arg(long, global = true, env = "MORI_THREADS")]
    pub threads: Option<usize>,

    /// Emit (x, y, ci) triples for plotting instead of the report (sweep, slope).
    #[arg(long, global = true)]
    pub plot_data: bool,

    /// Re-run the invocation recorded in a saved manifest.
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Sample one graph and write its edge list or outcome log.
    Generate(GenerateArgs),
    /// Triangle, pair and clustering statistics of one graph.
    Stats(StatsArgs),
    /// Exact containment probability or expectation by full enumeration.
    Exact(ExactArgs),
    /// Leading-order constants and predictions.
    Predict(PredictArgs),
    /// Replicate ensemble at one parameter point.
    Ensemble(EnsembleArgs),
    /// Ensembles over a grid of (n, m, beta).
    Sweep(SweepArgs),
    /// Fit of the mean triangle count against ln n.
    Slope(SlopeArgs),
    /// Exceedance of the adjacent-pair deviation band.
    Concentration(ConcentrationArgs),
    /// Size correlation of tracked blocks of two vertices.
    Blocks(BlocksArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Generate(_) => "generate",
            Command::Stats(_) => "stats",
            Command::Exact(_) => "exact",
            Command::Predict(_) => "predict",
            Command::Ensemble(_) => "ensemble",
            Command::Sweep(_) => "sweep",
            Command::Slope(_) => "slope",
            Command::Concentration(_) => "concentration",
            Command::Blocks(_) => "blocks",
        }
    }

    pub fn master_seed(&self) -> Option<u64> {
        match self {
            Command::Generate(a) => Some(a.model.seed),
            Command::Stats(a) => a.input.is_none().then_some(a.seed),
            Command::Exact(_) | Command::Predict(_) => None,
            Command::Ensemble(a) => Some(a.run.seed),
            Command::Sweep(a) => Some(a.run.seed),
            Command::Slope(a) => Some(a.run.seed),
            Command::Concentration(a) => Some(a.run.seed),
            Command::Blocks(a) => Some(a.run.seed),
        }
    }

    pub fn out(&self) -> Option<&PathBuf> {
        match self {
            Command::Generate(a) => a.out.as_ref(),
            Command::Stats(a) => a.out.as_ref(),
            Command::Exact(a) => a.out.as_ref(),
            Command::Predict(a) => a.out.as_ref(),
            Command::Ensemble(a) => a.run.out.as_ref(),
            Command::Sweep(a) => a.run.out.as_ref(),
            Command::Slope(a) => a.run.out.as_ref(),
            Command::Concentration(a) => a.run.out.as_ref(),
            Command::Blocks(a) => a.run.out.as_ref(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphFormat {
    Edges,
    Outcomes,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Number of merged vertices.
    #[arg(long)]
    pub n: usize,
    /// Tree vertices merged into each vertex.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Attractiveness, beta > 0.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = GraphFormat::Edges)]
    pub format: GraphFormat,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StatsArgs {
    /// Edge list to read ("-" for standard input); generates a graph when absent.
    pub input: Option<PathBuf>,
    #[arg(long, required_unless_present = "input", conflicts_with = "input")]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExactArgs {
    /// Possible forest such as "3>1,2>1".
    #[arg(long, required_unless_present = "statistic", conflicts_with = "statistic")]
    pub forest: Option<String>,
    /// triangles, adjacent_pairs, degenerate_pairs or clustering.
    #[arg(long)]
    pub statistic: Option<String>,
    /// Tree horizon for forest queries.
    #[arg(long, required_unless_present = "statistic")]
    pub t: Option<usize>,
    #[arg(long, required_unless_present = "forest")]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Attractiveness as an exact decimal or p/q.
    #[arg(long, default_value = "1")]
    pub beta: String,
    /// Largest tree size the enumeration may visit.
    #[arg(long, default_value_t = mori_core::exact::DEFAULT_CAP)]
    pub cap: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunArgs {
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    /// Master seed; replicate seeds are derived from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EnsembleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Exponent slack of the deviation band.
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    /// Comma-separated sizes, e.g. 1e3,1e4.
    #[arg(long, value_delimiter = ',', value_parser = parse_count, required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub m: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub beta: Vec<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SlopeArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_count, default_value = "1e3,1e4,1e5,1e6")]
    pub grid: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Weight grid points by inverse variance.
    #[arg(long)]
    pub weighted: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConcentrationArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BlocksArgs {
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Two distinct owner vertices, e.g. 3,7.
    #[arg(long, value_delimiter = ',', required = true)]
    pub owners: Vec<usize>,
    /// Tree time at which blocks are fixed.
    #[arg(long)]
    pub anchor: usize,
    /// Tree time at which block sizes are read.
    #[arg(long)]
    pub horizon: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

/// Accepts plain integers and integral scientific notation such as `1e5`.
pub fn parse_count(text: &str) -> Result<usize, String> {
    if let Ok(v) = text.trim().parse::<usize>() {
        return Ok(v);
    }
    let x: f64 = text
        .trim()
        .parse()
        .map_err(|_| format!("'{text}' is not a count"))?;
    if x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x < 2f64.powi(53) {
        Ok(x as usize)
    } else {
        Err(format!("'{text}' is not a non-negative integer"))
    }
}
