//! Writing reports to disk as one JSON document or a set of CSV tables.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every CSV
//! value parses back to the exact `f64` in the report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::{ExperimentReport, SystemComparison};

pub const OCCUPANCY_HEADER: &str = "state,visits,total_sojourn,mean_sojourn,theoretical_mean_sojourn,pmf";
pub const BUSY_PERIODS_HEADER: &str =
    "replication,index,start,length,customers_served,max_simultaneous,censored";
pub const HISTOGRAM_HEADER: &str = "bin_start,count";
pub const COUNTS_HEADER: &str = "value,count";
pub const REGRESSION_HEADER: &str = "scope,intercept,slope,correlation,n_points";
pub const COMPARISON_HEADER: &str =
    "label,rho,busy_periods,mean_busy_length,mean_in_system,max_simultaneous,empirical_mode,intercept,slope,correlation";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::Config(format!("unknown format `{other}` (expected json or csv)"))),
        }
    }
}

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn occupancy_csv(report: &ExperimentReport) -> String {
    let theory = report.pooled.theory.mean_sojourn.as_deref();
    let mut out = String::from(OCCUPANCY_HEADER);
    out.push('\n');
    for s in &report.pooled.occupancy.states {
        let expected = theory.and_then(|t| t.get(s.state as usize).copied());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.state,
            s.visits,
            s.total_sojourn,
            s.mean_sojourn,
            opt(expected),
            s.pmf
        );
    }
    out
}

pub fn busy_periods_csv(report: &ExperimentReport) -> String {
    let mut out = String::from(BUSY_PERIODS_HEADER);
    out.push('\n');
    for rep in &report.replications {
        for r in &rep.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                rep.index, r.index, r.start, r.length, r.customers_served, r.max_simultaneous, r.censored
            );
        }
    }
    out
}

pub fn length_histogram_csv(report: &ExperimentReport) -> String {
    let mut out = String::from(HISTOGRAM_HEADER);
    out.push('\n');
    for b in &report.pooled.busy.length_histogram {
        let _ = writeln!(out, "{},{}", b.bin_start, b.count);
    }
    out
}

fn counts_csv(bins: &[crate::metrics::CountBin]) -> String {
    let mut out = String::from(COUNTS_HEADER);
    out.push('\n');
    for b in bins {
        let _ = writeln!(out, "{},{}", b.value, b.count);
    }
    out
}

pub fn regression_csv(report: &ExperimentReport) -> String {
    let mut out = String::from(REGRESSION_HEADER);
    out.push('\n');
    let rows = std::iter::once(("pooled".to_string(), report.pooled.regression)).chain(
        report
            .replications
            .iter()
            .map(|r| (format!("replication-{}", r.index), r.regression)),
    );
    for (scope, reg) in rows {
        match reg {
            Some(r) => {
                let _ = writeln!(out, "{scope},{},{},{},{}", r.intercept, r.slope, r.correlation, r.n_points);
            }
            None => {
                let _ = writeln!(out, "{scope},,,,");
            }
        }
    }
    out
}

pub fn comparison_csv(cmp: &SystemComparison) -> String {
    let mut out = String::from(COMPARISON_HEADER);
    out.push('\n');
    for r in &cmp.rows {
        let reg = r.regression;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.label,
            r.rho,
            r.busy_periods,
            r.mean_busy_length,
            r.mean_in_system,
            r.max_simultaneous,
            r.empirical_mode,
            opt(reg.map(|g| g.intercept)),
            opt(reg.map(|g| g.slope)),
            opt(reg.map(|g| g.correlation)),
        );
    }
    out
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes `report` into `out_dir` and returns the paths written.
///
/// JSON produces `report.json`. CSV produces `occupancy.csv`,
/// `busy_periods.csv`, `busy_length_histogram.csv`, `x_distribution.csv`,
/// `y_distribution.csv` and `regression.csv`.
pub fn emit_report(report: &ExperimentReport, format: ReportFormat, out_dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(out_dir)?;
    match format {
        ReportFormat::Json => Ok(vec![write_file(out_dir.join("report.json"), &to_json(report)?)?]),
        ReportFormat::Csv => {
            let busy = &report.pooled.busy;
            let tables = [
                ("occupancy.csv", occupancy_csv(report)),
                ("busy_periods.csv", busy_periods_csv(report)),
                ("busy_length_histogram.csv", length_histogram_csv(report)),
                ("x_distribution.csv", counts_csv(&busy.x_distribution)),
                ("y_distribution.csv", counts_csv(&busy.y_distribution)),
                ("regression.csv", regression_csv(report)),
            ];
            tables
                .into_iter()
                .map(|(name, body)| write_file(out_dir.join(name), &body))
                .collect()
        }
    }
}

pub fn emit_comparison(cmp: &SystemComparison, format: ReportFormat, out_dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(out_dir)?;
    let path = match format {
        ReportFormat::Json => write_file(out_dir.join("comparison.json"), &to_json(cmp)?)?,
        ReportFormat::Csv => write_file(out_dir.join("comparison.csv"), &comparison_csv(cmp))?,
    };
    Ok(vec![path])
}

pub fn read_report(path: &Path) -> Result<ExperimentReport> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ExperimentReport::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::preset;
    use crate::experiment::run_experiment;

    fn report() -> ExperimentReport {
        let mut c = preset("MM-rho4").unwrap();
        c.n_arrivals = 800;
        c.replications = 2;
        run_experiment(&c).unwrap()
    }

    #[test]
    fn occupancy_table_layout() {
        let r = report();
        let csv = occupancy_csv(&r);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(OCCUPANCY_HEADER));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 6);
        assert_eq!(first[0], "0");
        assert_eq!(first[4].parse::<f64>().unwrap(), r.pooled.theory.mean_sojourn.as_ref().unwrap()[0]);
        assert_eq!(first[5].parse::<f64>().unwrap(), r.pooled.occupancy.states[0].pmf);
    }

    #[test]
    fn csv_and_json_files() {
        let r = report();
        let dir = tempfile::tempdir().unwrap();
        let csvs = emit_report(&r, ReportFormat::Csv, dir.path()).unwrap();
        assert_eq!(csvs.len(), 6);
        let busy = fs::read_to_string(dir.path().join("busy_periods.csv")).unwrap();
        assert_eq!(busy.lines().count(), 1 + r.pooled.busy.count);

        let json = emit_report(&r, ReportFormat::Json, dir.path()).unwrap();
        let back = read_report(&json[0]).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn io_errors_name_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let err = emit_report(&report(), ReportFormat::Json, &blocker.join("sub")).unwrap_err();
        assert!(err.to_string().contains("file"));
    }

    #[test]
    fn format_names() {
        assert_eq!("JSON".parse::<ReportFormat>().unwrap(), ReportFormat::Json);
        assert!("xml".parse::<ReportFormat>().is_err());
    }
}
