use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::{Error, Result};

use super::config::RunConfig;
use super::run::SolveOutcome;
use super::study::ConvergenceReport;

pub const CSV_HEADER: [&str; 5] = ["k", "h", "error", "order", "wall_seconds"];

/// One parsed CSV row; empty fields read back as `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub k: f64,
    pub h: f64,
    pub error: Option<f64>,
    pub order: Option<f64>,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunMetadata {
    pub crate_version: &'static str,
    pub git_commit: Option<String>,
    pub unix_time: u64,
    pub available_parallelism: usize,
}

impl RunMetadata {
    pub fn collect() -> Self {
        let git_commit = std::process::Command::new("git")
            .args(["rev-parse", "HEAD"])
            .output()
            .ok()
            .filter(|o| o.status.success())
            .and_then(|o| String::from_utf8(o.stdout).ok())
            .map(|s| s.trim().to_string());
        Self {
            crate_version: env!("CARGO_PKG_VERSION"),
            git_commit,
            unix_time: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            available_parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

fn sci(v: f64) -> String {
    format!("{v:.9e}")
}

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| Error::io(dir, e)),
        _ => Ok(()),
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

/// Path of the JSON file written next to `path`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    ensure_parent(path)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Writes the CSV table and its JSON sidecar.
pub fn write_report(report: &ConvergenceReport, config: Option<&RunConfig>, path: &Path) -> Result<()> {
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(CSV_HEADER).map_err(|e| csv_error(path, e))?;
    for r in &report.rows {
        let opt = |v: Option<f64>| v.map(sci).unwrap_or_default();
        w.write_record([sci(r.k), sci(r.h), opt(r.error), opt(r.order), sci(r.wall_seconds)])
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;

    #[derive(Serialize)]
    struct Sidecar<'a> {
        config: Option<&'a RunConfig>,
        metadata: RunMetadata,
        report: &'a ConvergenceReport,
    }
    write_json(
        &sidecar_path(path),
        &Sidecar {
            config,
            metadata: RunMetadata::collect(),
            report,
        },
    )
}

pub fn read_report_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = r.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("unexpected header {header:?}"),
        });
    }
    let bad = |field: &str| Error::Format {
        path: path.to_path_buf(),
        message: format!("cannot parse '{field}'"),
    };
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad(s));
    let opt = |s: &str| if s.is_empty() { Ok(None) } else { num(s).map(Some) };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        if rec.len() != 5 {
            return Err(bad(&format!("{rec:?}")));
        }
        rows.push(CsvRow {
            k: num(&rec[0])?,
            h: num(&rec[1])?,
            error: opt(&rec[2])?,
            order: opt(&rec[3])?,
            wall_seconds: num(&rec[4])?,
        });
    }
    Ok(rows)
}

/// A `p × p` grid, one CSV row per `y` line with `x` increasing along the row.
pub fn write_grid_csv(path: &Path, values: &[f64], p: usize) -> Result<()> {
    if values.len() != p * p {
        return Err(Error::DimensionMismatch {
            op: "write_grid_csv",
            expected: p * p,
            found: values.len(),
        });
    }
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for row in values.chunks(p.max(1)) {
        w.write_record(row.iter().map(|&v| sci(v)))
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes each snapshot species as `<stem>_step<n>_s<species>.csv` beside `path`.
pub fn write_snapshots(path: &Path, outcome: &SolveOutcome) -> Result<Vec<PathBuf>> {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
    let p = outcome.points_per_side;
    let mut written = Vec::new();
    for snap in &outcome.snapshots {
        for s in 0..outcome.species {
            let file = path.with_file_name(format!("{stem}_step{}_s{s}.csv", snap.step));
            write_grid_csv(&file, &snap.u[s * p * p..(s + 1) * p * p], p)?;
            written.push(file);
        }
    }
    Ok(written)
}

/// JSON summary of a single solve plus snapshot grids.
pub fn write_solve(outcome: &SolveOutcome, config: &RunConfig, path: &Path) -> Result<Vec<PathBuf>> {
    #[derive(Serialize)]
    struct Summary<'a> {
        config: &'a RunConfig,
        metadata: RunMetadata,
        problem: &'a crate::problems::ProblemKind,
        m: usize,
        h_actual: f64,
        h_nominal: Option<f64>,
        error: Option<f64>,
        setup_seconds: f64,
        step_seconds: f64,
        snapshot_times: Vec<f64>,
    }
    write_json(
        path,
        &Summary {
            config,
            metadata: RunMetadata::collect(),
            problem: &outcome.problem,
            m: outcome.m,
            h_actual: outcome.h,
            h_nominal: config.m.is_none().then_some(config.h).flatten(),
            error: outcome.error,
            setup_seconds: outcome.setup_seconds,
            step_seconds: outcome.step_seconds,
            snapshot_times: outcome.snapshots.iter().map(|s| s.t).collect(),
        },
    )?;
    write_snapshots(path, outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Scheme;
    use crate::harness::study::{ConvergenceRow, StudyKind};
    use crate::problems::ProblemKind;

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("etdrk4rdp-report-{}", std::process::id()));
        dir.join(name)
    }

    fn report(rows: Vec<ConvergenceRow>) -> ConvergenceReport {
        ConvergenceReport {
            study: StudyKind::Exact,
            problem: ProblemKind::DirichletLinear,
            scheme: Scheme::Rdp,
            t_final: 1.0,
            rows,
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        let path = tmp("empty.csv");
        write_report(&report(vec![]), None, &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "k,h,error,order,wall_seconds\n");
        assert!(read_report_csv(&path).unwrap().is_empty());
        assert!(sidecar_path(&path).exists());
    }

    #[test]
    fn one_row_round_trips() {
        let path = tmp("one.csv");
        let row = ConvergenceRow {
            k: 0.1,
            h: std::f64::consts::PI / 39.0,
            h_nominal: Some(0.08),
            m: 38,
            error: Some(1.5016033e-5),
            order: None,
            wall_seconds: 0.25,
            setup_seconds: 0.1,
            failure: None,
        };
        write_report(&report(vec![row.clone()]), None, &path).unwrap();
        let back = read_report_csv(&path).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].k, 0.1);
        assert!((back[0].h / row.h - 1.0).abs() < 1e-9);
        assert_eq!(back[0].error, Some(1.5016033e-5));
        assert_eq!(back[0].order, None);
        let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(sidecar_path(&path)).unwrap()).unwrap();
        assert_eq!(json["report"]["rows"][0]["h_nominal"], 0.08);
    }

    #[test]
    fn grid_csv_layout() {
        let path = tmp("grid.csv");
        write_grid_csv(&path, &[1.0, 2.0, 3.0, 4.0], 2).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines, ["1.000000000e0,2.000000000e0", "3.000000000e0,4.000000000e0"]);
        assert!(write_grid_csv(&path, &[1.0], 2).is_err());
    }

    #[test]
    fn unwritable_path_reports_location() {
        let blocker = tmp("blocker");
        ensure_parent(&blocker).unwrap();
        fs::write(&blocker, "").unwrap();
        let err = write_report(&report(vec![]), None, &blocker.join("x.csv")).unwrap_err();
        assert!(err.to_string().contains("blocker"), "{err}");
    }
}
