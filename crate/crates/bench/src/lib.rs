//! Benchmark harness: problem sets, repeated planner runs, summary
//! statistics and CSV output.

pub mod output;
pub mod problem;
pub mod run;
pub mod stats;
pub mod throughput;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Schema { path: PathBuf, message: String },
    #[error("invalid problems:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error(transparent)]
    Core(#[from] vecplan_core::error::Error),
    #[error("problem {id}: {source}")]
    Problem {
        id: String,
        source: vecplan_core::error::Error,
    },
    #[error("no run records to summarize")]
    EmptyRecords,
    #[error("cannot parse table row `{0}`")]
    TableRow(String),
    #[error("{}: {message}", path.display())]
    Output { path: PathBuf, message: String },
}
