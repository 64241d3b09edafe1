//! Batch runner for `bivar-core`: reads a JSON run configuration, audits
//! the representation at every requested point and order, and writes
//! `report.json` and `residuals.csv`.

use std::path::PathBuf;

pub mod config;
pub mod report;
pub mod run;

pub use config::{Plan, PointSpec, RunConfig, VariantConfig, MAX_N};
pub use report::{Report, Row, RowStatus, CSV_HEADER};
pub use run::{execute, EXIT_CONFIG, EXIT_DOMAIN, EXIT_NOT_CONVERGED, EXIT_OK};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot access {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid configuration JSON: {0}")]
    Json(#[source] serde_json::Error),
    #[error("cannot parse function {source_text:?}: {error}")]
    Function {
        source_text: String,
        error: bivar_core::ParseError,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("invalid configuration: {0}")]
    Core(#[from] bivar_core::Error),
}

/// Builds the text printed by `bivar catalog`.
pub fn catalog_text() -> String {
    use std::fmt::Write as _;
    let mut out = String::from("# two-variable functions; V = total bivariation on [0,1]^2\n");
    for e in bivar_core::catalog::catalog() {
        writeln!(
            out,
            "{:<20} {:<20} V = {:<22} {}",
            e.name, e.source, e.variation, e.note
        )
        .expect("String write");
    }
    out.push_str("# one-variable functions (variable t); V = total variation on [0,1]\n");
    for e in bivar_core::catalog::line_catalog() {
        writeln!(out, "{:<20} V = {}", e.source, e.variation).expect("String write");
    }
    out
}
