//! CSV and metadata writers.
//!
//! `runs.csv`: one row per run, times in nanoseconds.
//! `summary.csv`: one row, times in milliseconds with two decimals.
//! `cdf.csv`: `(time_ms, fraction)` for every successful run, ascending,
//! with fractions over all runs so failures keep the curve below 1.
//! `metadata.json`: settings used and a note on what the timings cover.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::run::{RunOptions, RunRecord};
use crate::stats::{Summary, TableRow};
use crate::BenchError;

#[derive(Serialize)]
struct RunRow<'a> {
    problem_id: &'a str,
    trial: usize,
    planner: &'static str,
    lanes: usize,
    success: bool,
    planning_ns: u64,
    simplify_ns: u64,
    initial_cost: Option<f64>,
    simplified_cost: Option<f64>,
    iterations: u64,
    vertices: usize,
    waypoints: Option<usize>,
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    planner: &'static str,
    lanes: usize,
    runs: usize,
    successes: usize,
    success: &'a str,
    mean_ms: &'a str,
    q1_ms: &'a str,
    median_ms: &'a str,
    q3_ms: &'a str,
    p95_ms: &'a str,
    mean_simplify_ms: &'a str,
}

fn csv_err(path: &Path, e: csv::Error) -> BenchError {
    BenchError::Output {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

pub fn write_runs_csv(
    path: &Path,
    records: &[RunRecord],
    options: &RunOptions,
) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    for r in records {
        w.serialize(RunRow {
            problem_id: &r.problem_id,
            trial: r.trial,
            planner: options.planner.name(),
            lanes: options.lanes(),
            success: r.success,
            planning_ns: r.planning_ns,
            simplify_ns: r.simplify_ns,
            initial_cost: r.initial_cost,
            simplified_cost: r.simplified_cost,
            iterations: r.iterations,
            vertices: r.vertices,
            waypoints: r.path.as_ref().map(|p| p.len()),
        })
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_summary_csv(
    path: &Path,
    summary: &Summary,
    options: &RunOptions,
) -> Result<(), BenchError> {
    let row = TableRow::from(summary);
    let c = &row.cells;
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.serialize(SummaryRow {
        planner: options.planner.name(),
        lanes: options.lanes(),
        runs: summary.runs,
        successes: summary.successes,
        success: &c[6],
        mean_ms: &c[0],
        q1_ms: &c[1],
        median_ms: &c[2],
        q3_ms: &c[3],
        p95_ms: &c[4],
        mean_simplify_ms: &c[5],
    })
    .map_err(|e| csv_err(path, e))?;
    w.flush().map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Empirical CDF points of planning time.
pub fn cdf_points(records: &[RunRecord]) -> Vec<(f64, f64)> {
    let mut times: Vec<f64> = records
        .iter()
        .filter(|r| r.success)
        .map(|r| r.planning_ns as f64 / 1e6)
        .collect();
    times.sort_by(f64::total_cmp);
    let total = records.len() as f64;
    times
        .into_iter()
        .enumerate()
        .map(|(i, t)| (t, (i + 1) as f64 / total))
        .collect()
}

pub fn write_cdf_csv(path: &Path, records: &[RunRecord]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["time_ms", "fraction"])
        .map_err(|e| csv_err(path, e))?;
    for (t, f) in cdf_points(records) {
        w.write_record([format!("{t:.6}"), format!("{f:.6}")])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Serialize)]
struct Metadata<'a> {
    problems: &'a str,
    planner: &'static str,
    lanes: usize,
    trials: usize,
    settings: &'a vecplan_core::planners::PlannerSettings,
    simplify: &'a Option<vecplan_core::simplify::SimplifySettings>,
    timing: &'static str,
}

pub fn write_metadata(path: &Path, problems: &str, options: &RunOptions) -> Result<(), BenchError> {
    let meta = Metadata {
        problems,
        planner: options.planner.name(),
        lanes: options.lanes(),
        trials: options.trials,
        settings: &options.settings,
        simplify: &options.simplify,
        timing: "planning_ns covers the planner call only; robot parsing and kinematics \
                 compilation happen once at load time and are excluded",
    };
    let text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    fs::write(path, text + "\n").map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}
