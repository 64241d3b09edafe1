use std::path::PathBuf;
use std::process::ExitCode;

use bivar_cli::{execute, RunConfig, EXIT_CONFIG};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bivar",
    version,
    about = "Chord-plane representation audits and error bounds on rectangles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the audit described by a JSON configuration file.
    Run {
        config: PathBuf,
        /// Override the refinement tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Override the L_p exponent (p > 1).
        #[arg(long)]
        p: Option<f64>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in test functions and their reference variations.
    Catalog,
}

fn run(config: PathBuf, tol: Option<f64>, p: Option<f64>, out: Option<PathBuf>) -> Result<i32, bivar_cli::CliError> {
    let mut cfg = RunConfig::load(&config)?;
    if let Some(tol) = tol {
        cfg.tol = tol;
    }
    if let Some(p) = p {
        cfg.p = p;
    }
    if let Some(out) = out {
        cfg.outputs = Some(out);
    }
    let dir = cfg.outputs.clone().unwrap_or_else(|| PathBuf::from("bivar-output"));
    let report = execute(&cfg)?;
    report.write_to(&dir)?;
    let s = &report.summary;
    eprintln!(
        "{} rows written to {} ({} not converged, {} domain errors)",
        s.rows,
        dir.display(),
        s.not_converged,
        s.domain_errors
    );
    for row in report.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "  ({}, {}), n = {}: {}",
            row.x,
            row.y,
            row.n,
            row.error.as_deref().unwrap_or("")
        );
    }
    Ok(s.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Catalog => {
            print!("{}", bivar_cli::catalog_text());
            ExitCode::SUCCESS
        }
        Command::Run { config, tol, p, out } => match run(config, tol, p, out) {
            Ok(code) => ExitCode::from(code as u8),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_CONFIG as u8)
            }
        },
    }
}
