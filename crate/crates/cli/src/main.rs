//! `cjl`: embed point sets with a circulant/Toeplitz JL transform, run the
//! verification experiments and time the FFT path.
//!
//! Exit codes: 0 success, 1 assertion failure, 2 usage or parse error,
//! 3 data error.

mod bench;
mod csvio;
mod embed;
mod error;
mod kbound;
mod verify;

use std::process::ExitCode;

use cjl_core::{CoefficientDistribution, MatrixStructure};
use clap::{Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "cjl",
    version,
    about = "Circulant Johnson-Lindenstrauss embeddings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed the rows of a CSV file.
    Embed(embed::EmbedArgs),
    /// Run a Monte Carlo verification experiment and write a JSON report.
    Verify(verify::VerifyArgs),
    /// Time the FFT path against direct summation.
    Bench(bench::BenchArgs),
    /// Print the target dimension and pairwise failure bound.
    Kbound(kbound::KboundArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistArg {
    Rademacher,
    Gaussian,
}

impl From<DistArg> for CoefficientDistribution {
    fn from(d: DistArg) -> Self {
        match d {
            DistArg::Rademacher => CoefficientDistribution::Rademacher,
            DistArg::Gaussian => CoefficientDistribution::Gaussian,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StructureArg {
    Circulant,
    Toeplitz,
}

impl From<StructureArg> for MatrixStructure {
    fn from(s: StructureArg) -> Self {
        match s {
            StructureArg::Circulant => MatrixStructure::Circulant,
            StructureArg::Toeplitz => MatrixStructure::Toeplitz,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("CJL_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "CJL_THREADS must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Embed(args) => embed::run(&args),
        Command::Verify(args) => verify::run(&args),
        Command::Bench(args) => bench::run(&args),
        Command::Kbound(args) => kbound::run(&args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cjl: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
