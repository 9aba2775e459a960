//! CSV and JSON artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use collide::dynamics::TrajectoryRow;
use collide::kramers::SweepOutput;
use collide::stopping::CollisionRecord;
use serde::Serialize;

use crate::CliError;

pub const REPORT: &str = "report.json";
pub const SWEEP: &str = "sweep.csv";
pub const RECORDS: &str = "records.csv";
pub const TRAJECTORIES: &str = "trajectories.csv";
pub const MANIFEST: &str = "manifest.json";

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> CliError + '_ {
    move |e| CliError::Io {
        path: path.display().to_string(),
        source: e.into(),
    }
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn coords(p: Option<&Vec<f64>>, d: usize) -> Vec<String> {
    match p {
        Some(p) => p.iter().copied().map(num).collect(),
        None => vec![String::new(); d],
    }
}

fn axis(prefix: &str, d: usize) -> Vec<String> {
    (0..d).map(|k| format!("{prefix}_{k}")).collect()
}

pub fn sweep_header(d: usize) -> Vec<String> {
    let mut h: Vec<String> = [
        "sigma",
        "t_max",
        "n_uncensored",
        "n_censored",
        "mean_time",
        "mean_log_time",
        "median_dist_lambda0",
        "location_mad",
        "within_delta",
        "window_fraction",
        "flagged",
    ]
    .map(String::from)
    .to_vec();
    h.extend(axis("location", d));
    h
}

pub fn records_header(d: usize) -> Vec<String> {
    let mut h: Vec<String> = [
        "sigma_index",
        "sigma",
        "replicate",
        "rule",
        "time",
        "censored",
    ]
    .map(String::from)
    .to_vec();
    h.extend(axis("x", d));
    h.extend(axis("y", d));
    h.extend(axis("mid", d));
    h
}

pub fn trajectories_header(d: usize) -> Vec<String> {
    let mut h: Vec<String> = ["sigma_index", "replicate", "t", "side", "particle"]
        .map(String::from)
        .to_vec();
    h.extend(axis("c", d));
    h
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e.into(),
    })?;
    text.push('\n');
    fs::write(path, text).map_err(io(path))
}

pub fn write_sweep_csv(path: &Path, out: &SweepOutput, d: usize) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(sweep_header(d)).map_err(csv_err(path))?;
    for r in &out.result.rows {
        let mut row = vec![
            num(r.sigma),
            num(r.t_max),
            r.n_uncensored.to_string(),
            r.n_censored.to_string(),
            opt(r.mean_time),
            opt(r.mean_log_time),
            opt(r.median_dist_lambda0),
            opt(r.location_mad),
            opt(r.within_delta),
            opt(r.window_fraction),
            r.flagged.to_string(),
        ];
        row.extend(coords(r.location_median.as_ref(), d));
        w.write_record(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io(path))
}

fn record_row(i: usize, sigma: f64, r: &CollisionRecord, d: usize) -> Vec<String> {
    let mut row = vec![
        i.to_string(),
        num(sigma),
        r.replicate.to_string(),
        r.rule.clone(),
        num(r.time),
        r.censored.to_string(),
    ];
    row.extend(coords(r.x_loc.as_ref(), d));
    row.extend(coords(r.y_loc.as_ref(), d));
    row.extend(coords(r.midpoint.as_ref(), d));
    row
}

pub fn write_records_csv(path: &Path, out: &SweepOutput, d: usize) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(records_header(d)).map_err(csv_err(path))?;
    for (i, (recs, row)) in out.records.iter().zip(&out.result.rows).enumerate() {
        for r in recs {
            w.write_record(record_row(i, row.sigma, r, d))
                .map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(io(path))
}

pub fn write_trajectories_csv(
    path: &Path,
    trajectories: &[(usize, u64, Vec<TrajectoryRow>)],
    d: usize,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(trajectories_header(d))
        .map_err(csv_err(path))?;
    for (i, rep, rows) in trajectories {
        for r in rows {
            let mut row = vec![
                i.to_string(),
                rep.to_string(),
                num(r.t),
                if r.side == 0 { "x" } else { "y" }.to_string(),
                r.particle.to_string(),
            ];
            row.extend(r.coords.iter().copied().map(num));
            w.write_record(row).map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(io(path))
}

/// Writes the sweep artifacts and returns their paths.
pub fn write_sweep(
    dir: &Path,
    report: &impl Serialize,
    out: &SweepOutput,
    d: usize,
) -> Result<Vec<PathBuf>, CliError> {
    let mut files = vec![dir.join(REPORT), dir.join(SWEEP), dir.join(RECORDS)];
    write_json(&files[0], report)?;
    write_sweep_csv(&files[1], out, d)?;
    write_records_csv(&files[2], out, d)?;
    if !out.trajectories.is_empty() {
        let p = dir.join(TRAJECTORIES);
        write_trajectories_csv(&p, &out.trajectories, d)?;
        files.push(p);
    }
    Ok(files)
}
