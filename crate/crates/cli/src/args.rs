use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "specmap", version, about = "Synthesize, reconstruct, score and render frequency-space spectrum maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a dataset of scenes, ground truth and sparse observations.
    Generate(GenerateArgs),
    /// Reconstruct complete cubes from a dataset with a classical estimator.
    Reconstruct(ReconstructArgs),
    /// Score prediction files against a dataset and write a CSV report.
    Eval(EvalArgs),
    /// Render one frequency layer of one scene as a PGM image.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Number of scenes.
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
    pub scenes: u64,
    /// Fraction of free cells holding a receiver, in (0, 1].
    #[arg(long, default_value_t = 0.05)]
    pub density: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// key = value configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Every transmitter emits on every frequency.
    #[arg(long)]
    pub broadband: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Idw,
    Knn,
    Kriging,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// IDW distance exponent.
    #[arg(long, default_value_t = 2.0)]
    pub power: f64,
    /// KNN neighbor count.
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Kriging neighborhood size.
    #[arg(long, default_value_t = 32)]
    pub neighbors: usize,
    /// Side length of the area in meters; defaults to the config value.
    #[arg(long)]
    pub side_meters: Option<f64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MaskArg {
    #[value(name = "all_cells", alias = "all-cells")]
    AllCells,
    #[value(name = "exclude_buildings", alias = "exclude-buildings")]
    ExcludeBuildings,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub truth: PathBuf,
    /// Prediction file, optionally labeled as LABEL=PATH. Repeatable.
    #[arg(long = "pred", required = true)]
    pub predictions: Vec<String>,
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long, value_enum, default_value = "all_cells")]
    pub mask: MaskArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CubeArg {
    /// Ground truth P.
    Truth,
    /// Observed S.
    Incomplete,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Dataset or prediction file.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub scene: u64,
    /// Frequency of the layer to draw, MHz.
    #[arg(long)]
    pub freq: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = specmap_core::render::DEFAULT_LO_DBM, allow_negative_numbers = true)]
    pub lo: f64,
    #[arg(long, default_value_t = specmap_core::render::DEFAULT_HI_DBM, allow_negative_numbers = true)]
    pub hi: f64,
    /// Which cube of a dataset to draw.
    #[arg(long, value_enum, default_value = "truth")]
    pub cube: CubeArg,
    /// Layer frequencies of a prediction file, which does not store them.
    #[arg(long, value_delimiter = ',', default_value = "900,1500,1800,2100")]
    pub frequencies: Vec<f64>,
}
