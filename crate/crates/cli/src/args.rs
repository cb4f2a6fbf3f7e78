use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "cantor-frame", version, about = "Frame operators of Bernoulli measures on the Cantor set")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an assembled matrix in coordinate CSV
    Matrix(MatrixArgs),
    /// Eigenvalues, rooted weights, trace and Schatten sums
    Spectrum(SpectrumArgs),
    /// Moments of the rooted spectral measure
    Moments(MomentsArgs),
    /// Top eigenvalue by the secular equation and by direct solve
    Topeig(TopeigArgs),
    /// Run the invariant suite and print a pass/fail table
    Selfcheck(SelfcheckArgs),
    /// Top eigenvalue, lower bound and moments over a grid of weights
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    KmClosed,
    KmGram,
    KmFiltration,
    Kinf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Float,
    Rational,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file (written atomically); stdout when absent
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    /// Branch weight, as "num/den" or a decimal in (0, 1)
    #[arg(long)]
    pub p: String,
    /// Frame depth
    #[arg(long, default_value_t = 6)]
    pub m: usize,
    #[arg(long, value_enum, default_value_t = Which::KmClosed)]
    pub which: Which,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub p: String,
    #[arg(long, default_value_t = 6)]
    pub m: usize,
    #[arg(long, value_enum, default_value_t = Which::KmClosed)]
    pub which: Which,
    /// Schatten exponent for the reported partial sum
    #[arg(long, default_value_t = 2.0)]
    pub r: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long)]
    pub p: String,
    /// Highest moment index
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Float)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TopeigArgs {
    #[arg(long)]
    pub p: String,
    /// Truncation depth
    #[arg(long = "M", default_value_t = 12)]
    pub big_m: usize,
    /// Bisection width
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SelfcheckArgs {
    /// Branch weight for the non-symmetric checks
    #[arg(long, default_value = "3/10")]
    pub p: String,
    /// Depth for the finite-frame checks
    #[arg(long, default_value_t = 6)]
    pub m: usize,
    /// Truncation depth for the resolvent checks
    #[arg(long = "M", default_value_t = 12)]
    pub big_m: usize,
    /// Perturb the filtration assembly (negative control)
    #[arg(long, hide = true)]
    pub perturb: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Weight grid "start:stop:step"
    #[arg(long)]
    pub grid: String,
    #[arg(long = "M", default_value_t = 12)]
    pub big_m: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}
