mod commands;
mod doc;
mod error;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "pstchain",
    version,
    about = "Persymmetric Jacobi chains with perfect state transfer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a named chain and write its spectral data, matrix and PST certificate.
    Construct(ConstructArgs),
    /// Certify PST and locate early state exclusion times.
    Analyze(AnalyzeArgs),
    /// Export boundary amplitudes on a uniform time grid.
    Evolve(EvolveArgs),
    /// Draw |x_0| and |x_N| as a standalone SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Krawtchouk,
    GapFamily,
    Surgery,
    #[value(name = "example-4x4")]
    Example4x4,
    FromSpectrum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(value_enum)]
    pub kind: Kind,
    /// Chain length parameter for krawtchouk (N + 1 sites) and surgery (odd N).
    #[arg(long = "N")]
    pub big_n: Option<usize>,
    /// Half-size of the gap family.
    #[arg(long)]
    pub n: Option<usize>,
    /// Central gap index of the gap family.
    #[arg(long)]
    pub m: Option<usize>,
    /// Spectrum file (JSON array) for from-spectrum.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Tolerance for the PST gap test.
    #[arg(long, default_value_t = pstchain::dynamics::PST_TOLERANCE)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Residual bound for accepting a zero of x_0.
    #[arg(long, default_value_t = pstchain::dynamics::ZERO_TOLERANCE)]
    pub tol: f64,
    /// Tolerance for the PST gap test.
    #[arg(long, default_value_t = pstchain::dynamics::PST_TOLERANCE)]
    pub pst_tol: f64,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub t0: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub t1: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t0: f64,
    /// Defaults to the transfer time.
    #[arg(long, allow_negative_numbers = true)]
    pub t1: Option<f64>,
    #[arg(long, default_value_t = 629)]
    pub steps: usize,
    /// Residual bound for the ESE markers.
    #[arg(long, default_value_t = pstchain::dynamics::ZERO_TOLERANCE)]
    pub tol: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Construct(args) => commands::construct(args),
        Command::Analyze(args) => commands::analyze(args),
        Command::Evolve(args) => commands::evolve(args),
        Command::Plot(args) => commands::plot(args),
    };
    match result.and_then(|manifest| commands::print_manifest(&manifest)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pstchain: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
