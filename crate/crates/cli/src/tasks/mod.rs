//! Task implementations. Each turns its config section into an [`Outcome`].

mod convex;
mod exceptional;
mod jets;

use std::path::Path;

use crate::config::{RunConfig, UsageError};
use crate::report::Outcome;
use convexlab::{Error, Tolerances};

#[derive(Debug)]
pub enum TaskError {
    Usage(UsageError),
    /// the computation itself failed
    Failed(String),
}

impl From<UsageError> for TaskError {
    fn from(e: UsageError) -> Self {
        TaskError::Usage(e)
    }
}

impl From<Error> for TaskError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownMetric(_) | Error::InvalidParameter(_) | Error::InvalidOrder(_) | Error::OutsideDomain(_) => {
                TaskError::Usage(UsageError(e.to_string()))
            }
            other => TaskError::Failed(other.to_string()),
        }
    }
}

impl std::fmt::Display for TaskError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TaskError::Usage(e) => write!(f, "{e}"),
            TaskError::Failed(msg) => write!(f, "{msg}"),
        }
    }
}

pub(crate) fn bad<T>(msg: impl Into<String>) -> Result<T, TaskError> {
    Err(TaskError::Usage(UsageError(msg.into())))
}

/// Runs the configured task; `base_dir` resolves relative paths in the config.
pub fn run_task(cfg: &RunConfig, tol: &Tolerances, base_dir: &Path) -> Result<Outcome, TaskError> {
    let seed = cfg.seed.unwrap_or(0);
    match cfg.task.as_str() {
        "transport-convergence" => jets::transport_convergence(cfg, base_dir),
        "jet-check" => jets::jet_check(cfg.jet_check.clone().unwrap_or_default(), seed),
        "exceptional-scan" => exceptional::exceptional_scan(cfg, tol, base_dir),
        "geodesic-scan" => exceptional::geodesic_scan(cfg, tol, base_dir),
        "jet-survey" => exceptional::jet_survey(cfg.jet_survey.clone().unwrap_or_default(), seed, tol),
        "hull-iterate" => convex::hull(cfg, base_dir),
        "key-lemma-audit" => convex::key_lemma(cfg, base_dir),
        "strict-convexity-audit" => convex::strict_convexity(cfg, base_dir),
        other => bad(format!("unknown task `{other}`")),
    }
}
