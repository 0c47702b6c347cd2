//! Command-line front end. `run` parses argv, dispatches, and maps errors to
//! exit codes: 0 success, 2 usage, 3 I/O, 4 validation.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    /// Prefixes the message with the path it concerns.
    pub fn at(self, path: &std::path::Path) -> Self {
        let p = path.display();
        match self {
            CliError::Usage(m) => CliError::Usage(format!("{p}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{p}: {m}")),
            CliError::Validation(m) => CliError::Validation(format!("{p}: {m}")),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Validation(_) => EXIT_VALIDATION,
        }
    }
}

impl From<curvedither::Error> for CliError {
    fn from(e: curvedither::Error) -> Self {
        match e {
            curvedither::Error::Io(_) => CliError::Io(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "curvedither", version, about = "Adaptive curved Markov-Gaussian dithering for SDR-to-HDR pipelines")]
pub struct Cli {
    /// Worker threads for bank generation and injection (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a pattern bank (offline stage).
    Genbank(GenbankArgs),
    /// Drop low bits of every codeword.
    Quantize(QuantizeArgs),
    /// Inject noise into a quantized 10-bit image (online stage).
    Inject(InjectArgs),
    /// Print the region partition and slope bins of a BLUT.
    BlutInspect(BlutInspectArgs),
    /// Banding and noise metrics of an image, as JSON on stdout.
    Measure(MeasureArgs),
    /// Run the whole pipeline on a synthetic ramp.
    Demo(DemoArgs),
}

#[derive(Args, Debug)]
pub struct GenbankArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = curvedither::pattern::DEFAULT_BLOCK_SIDE)]
    pub block_side: usize,
    /// Voronoi sites per quadrant.
    #[arg(long, default_value_t = curvedither::pattern::DEFAULT_SITE_COUNT)]
    pub sites: usize,
    #[arg(long, default_value_t = curvedither::pattern::DEFAULT_VARIANTS)]
    pub variants: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub mu0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma0: f64,
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    pub mu1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma1: f64,
}

#[derive(Args, Debug)]
pub struct QuantizeArgs {
    /// Input image stem (`STEM.json` plus `STEM.{y,cb,cr}.pgm`).
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub drop_bits: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Curved,
    Gaussian,
    LpfGaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChromaMode {
    Off,
    Fixed,
}

#[derive(Args, Debug)]
pub struct InjectArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Pattern bank; required for the curved method.
    #[arg(long)]
    pub bank: Option<PathBuf>,
    /// BLUT JSON; required for the curved method and for --emit-hdr.
    #[arg(long)]
    pub blut: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub gain: f64,
    #[arg(long, default_value_t = 0)]
    pub frame: u64,
    #[arg(long, value_enum, default_value_t = Method::Curved)]
    pub method: Method,
    #[arg(long, value_enum, default_value_t = ChromaMode::Fixed)]
    pub chroma: ChromaMode,
    /// Seeds the tile offsets (curved) or the noise field (baselines).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the BLUT-mapped HDR image to this stem.
    #[arg(long)]
    pub emit_hdr: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BlutInspectArgs {
    #[arg(long)]
    pub blut: PathBuf,
}

#[derive(Args, Debug)]
pub struct MeasureArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Quantized reference; its codeword spacing sets the step threshold.
    #[arg(long = "ref")]
    pub reference: Option<PathBuf>,
    /// Also write the per-channel report as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DemoArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match with_threads(cli.threads, || commands::dispatch(cli.command)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(feature = "parallel")]
fn with_threads(threads: Option<u16>, f: impl FnOnce() -> Result<(), CliError> + Send) -> Result<(), CliError> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?
            .install(f),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads(_threads: Option<u16>, f: impl FnOnce() -> Result<(), CliError> + Send) -> Result<(), CliError> {
    f()
}
