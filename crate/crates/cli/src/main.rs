//! `cdenoise` command-line front end.
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 I/O or format error.

mod commands;
mod samples;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BuildArgs, DenoiseImageArgs, DpCurveArgs, PeArgs, VerifyArgs};

#[derive(Debug, Parser)]
#[command(name = "cdenoise", version, about = "Codebook-based ML denoising and bound verification")]
struct Cli {
    /// Worker threads for trial and patch loops. Output does not depend on it.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    threads: u16,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a codebook from a sample file or the patches of a PGM image.
    CodebookBuild(BuildArgs),
    /// Monte Carlo check of the reconstruction-error envelope.
    VerifyBounds(VerifyArgs),
    /// Empirical decoding error probability against its union bounds.
    Pe(PeArgs),
    /// Tabulate the distortion–perception function.
    DpCurve(DpCurveArgs),
    /// Denoise a PGM image patch by patch.
    DenoiseImage(DenoiseImageArgs),
}

/// Failure carrying the process exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<cdenoise::Error> for CliError {
    fn from(e: cdenoise::Error) -> Self {
        match e {
            cdenoise::Error::Io(_) | cdenoise::Error::Format(_) => CliError::Io(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(usize::from(cli.threads))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} threads: {e}", cli.threads)))?;
    pool.install(|| match cli.command {
        Command::CodebookBuild(args) => commands::codebook_build(args),
        Command::VerifyBounds(args) => commands::verify_bounds(args),
        Command::Pe(args) => commands::pe(args),
        Command::DpCurve(args) => commands::dp_curve(args),
        Command::DenoiseImage(args) => commands::denoise_image(args),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Usage(msg) | CliError::Io(msg)) = &e;
            eprintln!("error: {msg}");
            ExitCode::from(e.code())
        }
    }
}
