use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 12] = [
    "experiment",
    "case",
    "scheme",
    "n_steps",
    "n_paths",
    "runs",
    "mean_price",
    "run_std",
    "ref_price",
    "rel_error",
    "elapsed_s",
    "memory_bytes",
];

/// Aggregated result of one case across all runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub case: String,
    pub scheme: String,
    pub n_steps: usize,
    pub n_paths: usize,
    pub runs: usize,
    pub mean_price: f64,
    /// Sample standard deviation of the per-run prices.
    pub run_std: f64,
    pub ref_price: Option<f64>,
    pub rel_error: Option<f64>,
    /// Mean seconds per run spent simulating and pricing.
    pub elapsed_s: f64,
    pub memory_bytes: u64,
}

impl ReportRow {
    /// Standard error of `mean_price` estimated from the run spread.
    pub fn run_std_error(&self) -> f64 {
        self.run_std / (self.runs as f64).sqrt()
    }
}

/// Exercise-date placement used by an experiment and by its generated reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRecord {
    pub experiment: String,
    pub n_steps: usize,
    pub exercise_indices: Vec<usize>,
    pub reference_n_steps: Option<usize>,
    pub reference_indices: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub rows: Vec<ReportRow>,
    pub schedules: Vec<ScheduleRecord>,
}

impl ExperimentReport {
    /// Concatenates reports in the given order.
    pub fn merge(name: impl Into<String>, parts: impl IntoIterator<Item = ExperimentReport>) -> Self {
        let mut out = ExperimentReport {
            name: name.into(),
            rows: Vec::new(),
            schedules: Vec::new(),
        };
        for p in parts {
            out.rows.extend(p.rows);
            out.schedules.extend(p.schedules);
        }
        out
    }

    pub fn row(&self, experiment: &str, case: &str) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.experiment == experiment && r.case == case)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
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

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

pub fn to_csv_string(report: &ExperimentReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Report(e.to_string());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in &report.rows {
        w.serialize((
            &r.experiment,
            &r.case,
            &r.scheme,
            r.n_steps,
            r.n_paths,
            r.runs,
            r.mean_price,
            r.run_std,
            r.ref_price,
            r.rel_error,
            r.elapsed_s,
            r.memory_bytes,
        ))
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Report(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn to_json_string(report: &ExperimentReport) -> Result<String> {
    serde_json::to_string_pretty(report).map_err(|e| Error::Report(e.to_string()))
}

pub fn from_json_str(text: &str) -> Result<ExperimentReport> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: &Path) -> Result<()> {
    let body = match format {
        ReportFormat::Csv => to_csv_string(report)?,
        ReportFormat::Json => to_json_string(report)?,
    };
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = File::create(path).map_err(io)?;
    f.write_all(body.as_bytes()).map_err(io)?;
    Ok(())
}
