//! Report rows and their CSV/JSON serializations.
//!
//! CSV columns are fixed:
//! symbol_id,h,N_b,spec_bottom,lambda,lambda_ess,lambda_sup,lambda_sup_ess,ratio,ess_ratio,converged,caveats,runtime_ms
//! with numbers at 12 significant digits, so identical inputs produce
//! byte-identical files.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("nothing to report")]
    Empty,
}

/// One (symbol, h) record of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GapReport {
    pub symbol_id: String,
    pub h: f64,
    pub n_b: usize,
    pub spec_bottom: Option<f64>,
    pub lambda: Option<f64>,
    pub lambda_ess: Option<f64>,
    pub lambda_sup: Option<f64>,
    pub lambda_sup_ess: Option<f64>,
    /// (spec_bottom − shift) / (λ − shift); λ′ replaces λ in the
    /// semiclassical pipeline.
    pub ratio: Option<f64>,
    /// analytic ess-bottom over the ess estimator, when the former is known.
    pub ess_ratio: Option<f64>,
    pub converged: bool,
    pub caveats: Vec<String>,
    pub runtime_ms: u64,
    /// Populated when the row failed; numeric fields are then empty.
    pub error: Option<String>,
}

/// Long-form shell-profile record.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProfileRow {
    pub symbol_id: String,
    pub h: f64,
    pub estimator: String,
    pub shell_radius: f64,
    pub value: f64,
}

/// 12 significant digits, deterministic.
pub fn sig12(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{v:.11e}")
    }
}

fn opt12(v: &Option<f64>) -> String {
    v.map(sig12).unwrap_or_default()
}

pub const CSV_HEADER: &str = "symbol_id,h,N_b,spec_bottom,lambda,lambda_ess,lambda_sup,lambda_sup_ess,ratio,ess_ratio,converged,caveats,runtime_ms";

pub fn to_csv(rows: &[GapReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let caveats = r
            .caveats
            .iter()
            .cloned()
            .chain(r.error.iter().map(|e| format!("error:{e}")))
            .collect::<Vec<_>>()
            .join(";")
            .replace(',', " ");
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.symbol_id,
            sig12(r.h),
            r.n_b,
            opt12(&r.spec_bottom),
            opt12(&r.lambda),
            opt12(&r.lambda_ess),
            opt12(&r.lambda_sup),
            opt12(&r.lambda_sup_ess),
            opt12(&r.ratio),
            opt12(&r.ess_ratio),
            r.converged,
            caveats,
            r.runtime_ms
        ));
    }
    out
}

pub fn to_json(rows: &[GapReport]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("report rows serialize");
    s.push('\n');
    s
}

/// Output format of the emitters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

/// Write the report in the requested format; returns the path written.
pub fn emit_report(
    rows: &[GapReport],
    format: ReportFormat,
    dir: &std::path::Path,
    stem: &str,
) -> Result<std::path::PathBuf, ReportError> {
    if rows.is_empty() {
        return Err(ReportError::Empty);
    }
    let path = dir.join(format!("{stem}.{}", format.extension()));
    let body = match format {
        ReportFormat::Csv => to_csv(rows),
        ReportFormat::Json => to_json(rows),
    };
    std::fs::write(&path, body).map_err(|e| ReportError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(path)
}

pub fn emit_profiles(
    rows: &[ProfileRow],
    dir: &std::path::Path,
    stem: &str,
) -> Result<std::path::PathBuf, ReportError> {
    let path = dir.join(format!("{stem}.csv"));
    let mut out = String::from("symbol_id,h,estimator,shell_radius,value\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.symbol_id,
            sig12(r.h),
            r.estimator,
            sig12(r.shell_radius),
            sig12(r.value)
        ));
    }
    std::fs::write(&path, out).map_err(|e| ReportError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(path)
}

/// Per-(symbol, p) weight diagnostic record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AinftyRow {
    pub symbol_id: String,
    pub p: f64,
    pub constant_estimate: f64,
    pub n_balls: usize,
    pub worst_center: [f64; 2],
    pub worst_radius: f64,
    pub radius_range: (f64, f64),
}

pub fn emit_ainfty(
    rows: &[AinftyRow],
    dir: &std::path::Path,
    stem: &str,
) -> Result<std::path::PathBuf, ReportError> {
    let path = dir.join(format!("{stem}.csv"));
    let mut out = String::from(
        "symbol_id,p,constant_estimate,n_balls,worst_x,worst_w,worst_radius,radius_min,radius_max\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.symbol_id,
            sig12(r.p),
            sig12(r.constant_estimate),
            r.n_balls,
            sig12(r.worst_center[0]),
            sig12(r.worst_center[1]),
            sig12(r.worst_radius),
            sig12(r.radius_range.0),
            sig12(r.radius_range.1)
        ));
    }
    std::fs::write(&path, out).map_err(|e| ReportError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(path)
}
