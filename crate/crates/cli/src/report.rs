//! Report rows, `report.json` and `residuals.csv`.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::CliError;

/// Outcome class of one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Ok,
    NotConverged,
    DomainError,
    Failed,
}

/// Midpoint-only columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MidpointRow {
    pub e_m: Option<f64>,
    pub f_m: Option<f64>,
    pub f_m_est_error: Option<f64>,
    pub f_m_converged: bool,
    /// `f - E - F`.
    pub residual: Option<f64>,
}

/// One (point, n) cell of a run. Non-finite or unavailable numbers are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub x: f64,
    pub y: f64,
    pub n: u32,
    pub status: RowStatus,
    pub error: Option<String>,
    pub f: Option<f64>,
    pub a_n: Option<f64>,
    pub b_n: Option<f64>,
    pub b_est_error: Option<f64>,
    pub b_levels: Vec<f64>,
    pub b_converged: bool,
    /// `f - A_n - B_n`.
    pub residual: Option<f64>,
    pub midpoint: Option<MidpointRow>,
    pub var_bound_pt: Option<f64>,
    pub var_bound_global: Option<f64>,
    pub linf_bound: Option<f64>,
    pub lp_bound: Option<f64>,
    /// Total bivariation of `D^(n,n) f`.
    pub variation: Option<f64>,
    pub variation_converged: bool,
    /// `‖D^(n+1,n+1) f‖∞` and `‖D^(n+1,n+1) f‖_p`.
    pub linf_norm: Option<f64>,
    pub linf_norm_converged: bool,
    pub lp_norm: Option<f64>,
    pub lp_norm_converged: bool,
    /// Bounds built on an unconverged estimate.
    pub advisory: bool,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: usize,
    pub not_converged: usize,
    pub domain_errors: usize,
    pub failed: usize,
    pub exit_code: i32,
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub q: f64,
    pub sign_variant: String,
    pub midpoint_variant: String,
    pub remainder_mode: String,
    pub rows: Vec<Row>,
    pub summary: Summary,
}

pub const CSV_HEADER: &str = "x,y,n,f,A_n,B_n,residual,var_bound_pt,var_bound_global,linf_bound,lp_bound,converged";

fn num(out: &mut String, v: Option<f64>) {
    match v {
        Some(v) => write!(out, "{v:.16e}").expect("writing to a String"),
        None => out.push_str("NaN"),
    }
}

impl Report {
    /// `residuals.csv`: one line per row, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 + 256 * self.rows.len());
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            num(&mut out, Some(r.x));
            out.push(',');
            num(&mut out, Some(r.y));
            write!(out, ",{},", r.n).expect("writing to a String");
            for v in [
                r.f,
                r.a_n,
                r.b_n,
                r.residual,
                r.var_bound_pt,
                r.var_bound_global,
                r.linf_bound,
                r.lp_bound,
            ] {
                num(&mut out, v);
                out.push(',');
            }
            out.push_str(if r.converged { "true" } else { "false" });
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(CliError::Json)
    }

    /// Writes `report.json` and `residuals.csv` into `dir`, creating it.
    pub fn write_to(&self, dir: &Path) -> Result<(), CliError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CliError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let json = dir.join("report.json");
        std::fs::write(&json, self.to_json()).map_err(io(&json))?;
        let csv = dir.join("residuals.csv");
        std::fs::write(&csv, self.to_csv()).map_err(io(&csv))?;
        Ok(())
    }
}
