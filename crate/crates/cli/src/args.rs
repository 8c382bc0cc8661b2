//! Command-line flags.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "fracsim", version, about = "Simulate OU, fOU and fGLE velocity paths and validate them")]
pub struct Cli {
    /// Master seed; every random stream derives from it.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Output directory. Without it, the primary table goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for replicate loops (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Absolute tolerance of adaptive quadrature.
    #[arg(long, global = true)]
    pub quad_tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Also write an SVG line plot (requires --out).
    #[arg(long, global = true)]
    pub svg: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Simulate one sample path.
    Simulate(SimulateArgs),
    /// Dump the time-domain cascade filters u_j, v_j and g_0.
    Filters(FiltersArgs),
    /// Evaluate a spectral density on a frequency grid.
    Density(DensityArgs),
    /// Autocovariances on lags 0..=lags.
    Acvf(AcvfArgs),
    /// Run a Monte Carlo comparison of simulators.
    Validate(ValidateArgs),
    /// Spectral goodness-of-fit statistic of a path read from CSV.
    Gof(GofArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessArg {
    Ou,
    Fou,
    Fgle,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub process: ProcessArg,
    #[arg(long, default_value_t = 1.0)]
    pub zeta: f64,
    /// Noise scale (OU and fOU).
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Memory parameter (fOU and fGLE).
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<f64>,
    /// Particle mass (fGLE).
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    /// Thermal factor k_B·τ (fGLE).
    #[arg(long, default_value_t = 1.0)]
    pub thermal: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SmoothingArg {
    Smoothed,
    Truncated,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WaveletArgs {
    /// Final scale J.
    #[arg(long = "J", default_value_t = 6)]
    pub j: u32,
    /// Daubechies vanishing moments (1, 2, 4 or 8).
    #[arg(long, default_value_t = 4)]
    pub vanishing_moments: usize,
    #[arg(long, value_enum, default_value_t = SmoothingArg::Smoothed)]
    pub smoothing: SmoothingArg,
    /// Smoothing parameter υ.
    #[arg(long, default_value_t = 1.0)]
    pub upsilon: f64,
    /// Filter truncation lag (default 40, or 80 for fGLE).
    #[arg(long)]
    pub trunc_lag: Option<usize>,
    /// Stop the truncation scan at the first coefficient below this.
    #[arg(long)]
    pub trunc_threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Wavelet,
    Cholesky,
    Cme,
    Ar1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitArg {
    Cme,
    Conv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[command(flatten)]
    pub wavelet: WaveletArgs,
    #[arg(long, value_enum, default_value_t = InitArg::Cme)]
    pub init: InitArg,
    /// Half-length of g_0 for --init conv.
    #[arg(long, default_value_t = 400)]
    pub t0: usize,
    /// Path length. Wavelet default: 2^J + L, from the shortest initial sequence.
    #[arg(long)]
    pub n: Option<usize>,
    /// Sampling interval of the AR(1) method.
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Emit the position path (wavelet) or unit-step increments (exact methods).
    #[arg(long)]
    pub position: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FiltersArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub wavelet: WaveletArgs,
    /// Half-length of the g_0 dump.
    #[arg(long, default_value_t = 40)]
    pub t0: usize,
    /// Scale printed on stdout (default J−1).
    #[arg(long)]
    pub scale: Option<u32>,
    /// Filter printed on stdout.
    #[arg(long, value_enum, default_value_t = WhichFilter::V)]
    pub which: WhichFilter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WhichFilter {
    U,
    V,
    G0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    /// Continuous-time density |ĝ(x)|² or its acvf.
    Continuous,
    /// Velocity sampled at integer times.
    Velocity,
    /// Unit-step position increments.
    Increments,
    /// Scale-0 process |ĝ_0|² used to initialize the cascade.
    Init,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DensityArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = SeriesKind::Velocity)]
    pub kind: SeriesKind,
    /// Grid points on (0, xmax].
    #[arg(long, default_value_t = 256)]
    pub points: usize,
    /// Grid end; π for discrete-time kinds.
    #[arg(long)]
    pub xmax: Option<f64>,
    #[arg(long, value_enum, default_value_t = SmoothingArg::Smoothed)]
    pub smoothing: SmoothingArg,
    #[arg(long, default_value_t = 1.0)]
    pub upsilon: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AcvfArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = SeriesKind::Velocity)]
    pub kind: SeriesKind,
    #[arg(long, default_value_t = 50)]
    pub lags: usize,
    #[arg(long, value_enum, default_value_t = SmoothingArg::Smoothed)]
    pub smoothing: SmoothingArg,
    #[arg(long, default_value_t = 1.0)]
    pub upsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentArg {
    /// fOU Local Whittle, wavelet vs CME vs Cholesky.
    Table3,
    /// OU Yule-Walker, wavelet vs CME vs iterative AR(1).
    Table4,
    /// fOU Local Whittle across final scales.
    Table5,
    /// fGLE Local Whittle on position increments.
    Table6,
    /// Spectral goodness-of-fit statistic across simulators.
    Gof,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ValidateArgs {
    #[arg(value_enum)]
    pub experiment: ExperimentArg,
    #[arg(long, default_value_t = 1000)]
    pub replicates: usize,
    /// Series length (default 512, or 2048 for table4).
    #[arg(long)]
    pub length: Option<usize>,
    /// Memory parameter (default 0.25).
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<f64>,
    /// Drift ζ (defaults: 1 for table3/5/gof and table4, 2 for table6).
    #[arg(long)]
    pub zeta: Option<f64>,
    /// Final scales to compare, comma separated.
    #[arg(long = "J", value_delimiter = ',')]
    pub js: Option<Vec<u32>>,
    /// Local Whittle bandwidth m (default ⌊n^0.6⌋).
    #[arg(long)]
    pub bandwidth: Option<usize>,
    /// Skip the CME row.
    #[arg(long)]
    pub no_cme: bool,
    #[arg(long, value_enum, default_value_t = InitArg::Cme)]
    pub init: InitArg,
    #[arg(long, default_value_t = 400)]
    pub t0: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GofArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// CSV with a header row; the last column is the series.
    #[arg(long)]
    pub input: PathBuf,
    /// What the series is.
    #[arg(long, value_enum, default_value_t = SeriesKind::Velocity)]
    pub kind: SeriesKind,
}
