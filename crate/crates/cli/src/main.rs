//! `xconv`: file-based front end for extended correlation, convolution and
//! the applications built on them.

mod cmd;
mod error;
mod fixture;
mod io;
mod sidecar;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::{param, CliResult};

#[derive(Parser)]
#[command(name = "xconv", version, about, propagate_version = true)]
struct Cli {
    /// Worker threads; 0 uses every core. Outputs do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Seed for every random draw (noise, built-in fixtures).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extended correlation: the filter is transformed at each output pixel.
    Xcorr(cmd::engine::FilterRun),
    /// Extended convolution: the filter is transformed at each input pixel.
    Xconv(cmd::engine::FilterRun),
    /// Normalized adaptive blur under a scale or rotation field.
    Smooth(cmd::engine::SmoothArgs),
    /// Vote-filter pattern detection.
    Detect(cmd::apps::DetectArgs),
    /// Extended convolution descriptors at keypoints.
    Ecd(cmd::apps::EcdArgs),
    /// Rank-based precision/recall of descriptor matching.
    Match(cmd::apps::MatchArgs),
    /// Complementary contour matching.
    Contour(cmd::apps::ContourArgs),
    /// Line integral convolution of a direction field.
    Lic(cmd::apps::LicArgs),
    /// 3D extended correlation or convolution under a rotation field.
    Steer3d(cmd::engine::Steer3dArgs),
    /// Decompose a filter into group harmonics.
    Decompose(cmd::decompose::DecomposeArgs),
    /// Compare the fast pipelines against the direct sums.
    OracleCheck(cmd::oracle::OracleArgs),
}

fn run(cli: Cli) -> CliResult<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Xcorr(a) => cmd::engine::filter_run(a, xconv::engine::Mode::Correlation, seed),
        Command::Xconv(a) => cmd::engine::filter_run(a, xconv::engine::Mode::Convolution, seed),
        Command::Smooth(a) => cmd::engine::smooth(a, seed),
        Command::Detect(a) => cmd::apps::detect(a),
        Command::Ecd(a) => cmd::apps::ecd(a),
        Command::Match(a) => cmd::apps::match_cmd(a),
        Command::Contour(a) => cmd::apps::contour(a),
        Command::Lic(a) => cmd::apps::lic(a, seed),
        Command::Steer3d(a) => cmd::engine::steer3d(a, seed),
        Command::Decompose(a) => cmd::decompose::decompose(a, seed),
        Command::OracleCheck(a) => cmd::oracle::oracle_check(a, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| param("threads", e.to_string()));
    let result = pool.and_then(|p| p.install(|| run(cli)));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("xconv: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
