//! CSV serialization: fields as plain rows of values, covariances with a
//! one-line `K=<K>,central=<idx>` header, info maps as float grids (NaN on
//! undefined sites), estimation reports, info summaries and trajectories
//! with their documented column orders. Values are written with the shortest
//! round-trip float representation, so files carry full double precision.

use std::fmt::Write as _;
use std::path::Path;

use gmrf_core::{
    EstimationReport, Field, InfoMap, InfoSummary, PatternCovariance, TrajectoryRecord,
};
use thiserror::Error;

use crate::fileio::{self, IoError};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("line {line}: {what}")]
    Malformed { line: usize, what: String },
    #[error(transparent)]
    Core(#[from] gmrf_core::Error),
}

pub const SUMMARY_HEADER: &str = "phi,psi,gap,linfo,entropy,var,beta_star_lo,beta_star_hi";
pub const TRAJECTORY_HEADER: &str =
    "iter,beta_true,beta_hat,phi,psi,entropy,linfo,var,beta_star_lo,beta_star_hi";
pub const REPORT_HEADER: &str = "n,k,mu,sigma2,beta,score";

pub fn field_to_csv(field: &Field) -> String {
    let mut out = String::new();
    for r in 0..field.height() {
        for c in 0..field.width() {
            if c > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", field.get(r, c));
        }
        out.push('\n');
    }
    out
}

pub fn field_from_csv(text: &str) -> Result<Field, CsvError> {
    let mut values = Vec::new();
    let mut width = None;
    let mut height = 0usize;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|t| t.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| CsvError::Malformed {
            line: i + 1,
            what: e.to_string(),
        })?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(CsvError::Malformed {
                    line: i + 1,
                    what: format!("expected {w} columns, got {}", row.len()),
                })
            }
            _ => {}
        }
        values.extend(row);
        height += 1;
    }
    let width = width.ok_or(CsvError::Malformed {
        line: 0,
        what: "empty file".to_string(),
    })?;
    Ok(Field::new(height, width, values)?)
}

pub fn covariance_to_csv(cov: &PatternCovariance) -> String {
    let k = cov.pattern_len();
    let mut out = format!("K={k},central={}\n", cov.central_index());
    for a in 0..k {
        for b in 0..k {
            if b > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", cov.sigma(a, b));
        }
        out.push('\n');
    }
    out
}

pub fn infomap_to_csv(map: &InfoMap) -> String {
    let mut out = String::new();
    for r in 0..map.height() {
        for c in 0..map.width() {
            if c > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", map.get(r, c));
        }
        out.push('\n');
    }
    out
}

/// Key=value text block of a fit, one field per line.
pub fn report_to_text(report: &EstimationReport) -> String {
    format!(
        "n={}\nk={}\nmu={}\nsigma2={}\nbeta={}\nscore={}\n",
        report.n_sites,
        report.k,
        report.params.mu,
        report.params.sigma2,
        report.params.beta,
        report.score_at_beta
    )
}

/// One CSV row in the documented `n,k,mu,sigma2,beta,score` order.
pub fn report_to_csv_row(report: &EstimationReport) -> String {
    format!(
        "{},{},{},{},{},{}",
        report.n_sites,
        report.k,
        report.params.mu,
        report.params.sigma2,
        report.params.beta,
        report.score_at_beta
    )
}

fn optional_pair(v: Option<(f64, f64)>) -> (String, String) {
    match v {
        Some((lo, hi)) => (format!("{lo}"), format!("{hi}")),
        None => (String::new(), String::new()),
    }
}

pub fn summary_to_csv_row(s: &InfoSummary) -> String {
    let (lo, hi) = optional_pair(s.beta_star);
    format!(
        "{},{},{},{},{},{},{lo},{hi}",
        s.phi, s.psi, s.gap, s.l_global, s.entropy, s.asym_var
    )
}

pub fn trajectory_to_csv(records: &[TrajectoryRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 128);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for r in records {
        let (lo, hi) = optional_pair(r.beta_star);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{lo},{hi}",
            r.iteration, r.beta_true, r.beta_hat, r.phi, r.psi, r.entropy, r.linfo, r.asym_var
        );
    }
    out
}

pub fn write_field_csv(path: &Path, field: &Field) -> Result<(), IoError> {
    fileio::write_atomic(path, field_to_csv(field).as_bytes())
}

pub fn read_field_csv(path: &Path) -> Result<Field, IoError> {
    let text = fileio::read_to_string(path)?;
    field_from_csv(&text).map_err(|e| IoError::parse(path, e.to_string()))
}
