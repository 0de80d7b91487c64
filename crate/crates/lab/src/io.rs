//! File formats: CSV tables and JSON sidecars.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use frontier_core::estimator::EstimateResult;
use frontier_core::simulate::{Point, PointSet};
use serde::{Deserialize, Serialize};

use crate::error::LabError;
use crate::experiments::ExperimentReport;

pub const POINTS_FILE: &str = "points.csv";
pub const POINTS_META_FILE: &str = "points.json";
pub const ESTIMATE_FILE: &str = "estimate.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const REPORT_FILE: &str = "report.json";
pub const REPLICATES_FILE: &str = "replicates.csv";
pub const RATES_FILE: &str = "rates.csv";
pub const META_SCHEMA: &str = "frontier-lab/points/v1";

/// Decimal rendering with 17 significant digits, enough to round-trip an f64.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointsMeta {
    pub schema: String,
    pub seed: u64,
    pub n: f64,
    pub mode: String,
    pub frontier: String,
    pub count: usize,
}

impl PointsMeta {
    pub fn of(points: &PointSet) -> Self {
        PointsMeta {
            schema: META_SCHEMA.to_string(),
            seed: points.seed,
            n: points.intensity,
            mode: points.mode.name().to_string(),
            frontier: points.frontier_id.clone(),
            count: points.len(),
        }
    }
}

fn create(path: &Path) -> Result<fs::File, LabError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
        }
    }
    fs::File::create(path).map_err(|e| LabError::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, LabError> {
    Ok(csv::Writer::from_writer(create(path)?))
}

fn csv_err(path: &Path, e: csv::Error) -> LabError {
    LabError::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<(), LabError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| LabError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), LabError> {
    let mut file = create(path)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| LabError::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    file.write_all(text.as_bytes())
        .and_then(|_| file.write_all(b"\n"))
        .map_err(|e| LabError::io(path, e))
}

/// Writes `points.csv` and its metadata sidecar into `dir`.
pub fn write_points(dir: &Path, points: &PointSet) -> Result<PathBuf, LabError> {
    let path = dir.join(POINTS_FILE);
    write_rows(
        &path,
        &["x", "y"],
        points.points.iter().map(|p| vec![fmt_f64(p.x), fmt_f64(p.y)]),
    )?;
    write_json(&dir.join(POINTS_META_FILE), &PointsMeta::of(points))?;
    Ok(path)
}

/// Reads an `x,y` table.
pub fn read_points(path: &Path) -> Result<Vec<Point>, LabError> {
    let file = fs::File::open(path).map_err(|e| LabError::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "y" {
        return Err(LabError::Format {
            path: path.to_path_buf(),
            reason: format!("expected header `x,y`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut out = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let parse = |i: usize| -> Result<f64, LabError> {
            record[i].trim().parse::<f64>().map_err(|e| LabError::Format {
                path: path.to_path_buf(),
                reason: format!("row {}: {e}", line + 2),
            })
        };
        out.push(Point { x: parse(0)?, y: parse(1)? });
    }
    Ok(out)
}

/// Reads the metadata sidecar next to a points file, if present.
pub fn read_points_meta(points_path: &Path) -> Result<Option<PointsMeta>, LabError> {
    let path = points_path.with_extension("json");
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).map_err(|e| LabError::io(&path, e))?;
    serde_json::from_str(&text).map(Some).map_err(|e| LabError::Format {
        path,
        reason: e.to_string(),
    })
}

pub fn write_estimate(dir: &Path, result: &EstimateResult) -> Result<PathBuf, LabError> {
    let path = dir.join(ESTIMATE_FILE);
    write_rows(
        &path,
        &["x", "estimate", "truth"],
        result
            .xs
            .iter()
            .zip(&result.estimates)
            .zip(&result.truth)
            .map(|((x, e), t)| vec![fmt_f64(*x), fmt_f64(*e), fmt_f64(*t)]),
    )?;
    Ok(path)
}

/// Writes `report.json`, `replicates.csv` and, when L1 errors were collected,
/// `rates.csv`.
pub fn write_report(dir: &Path, report: &ExperimentReport) -> Result<(), LabError> {
    write_json(&dir.join(REPORT_FILE), report)?;
    let mut replicates = Vec::new();
    let mut rates = Vec::new();
    for level in &report.levels {
        if let Some(l1) = &level.l1 {
            for (r, e) in l1.errors.iter().enumerate() {
                replicates.push(vec![fmt_f64(level.n), r.to_string(), fmt_f64(*e)]);
            }
            rates.push(vec![fmt_f64(level.n), fmt_f64(l1.mean), fmt_f64(l1.stderr)]);
        }
    }
    if !rates.is_empty() {
        write_rows(&dir.join(REPLICATES_FILE), &["n", "replicate", "l1_error"], replicates)?;
        write_rows(&dir.join(RATES_FILE), &["n", "mean_error", "stderr"], rates)?;
    }
    Ok(())
}
