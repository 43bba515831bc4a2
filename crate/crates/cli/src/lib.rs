//! Batch driver: reads a TOML run configuration, runs one task and writes
//! CSV tables, `summary.json` and `repro.txt`.

pub mod config;
pub mod report;
pub mod tasks;

use std::path::{Path, PathBuf};

use config::{RunConfig, UsageError, TASKS};
use report::{write_artifacts, Outcome, RunInfo};
use tasks::{run_task, TaskError};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Result of `run`: the exit code, the outcome when the task ran, and a
/// message for stderr.
pub struct RunResult {
    pub code: i32,
    pub outcome: Option<Outcome>,
    pub output: Option<PathBuf>,
    pub message: String,
}

fn usage_result(e: impl std::fmt::Display) -> RunResult {
    RunResult { code: EXIT_USAGE, outcome: None, output: None, message: format!("usage error: {e}") }
}

/// Loads `path`, runs the task and writes artifacts to `output` (or the
/// config's `output`, or `convexlab-out/<task>`).
pub fn run(path: &Path, output: Option<&Path>) -> RunResult {
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => return usage_result(format!("{}: {e}", path.display())),
    };
    let text = match String::from_utf8(bytes.clone()) {
        Ok(t) => t,
        Err(_) => return usage_result(format!("{}: not UTF-8", path.display())),
    };
    let cfg = match RunConfig::parse(&text) {
        Ok(c) => c,
        Err(UsageError(msg)) => return usage_result(format!("{}: {msg}", path.display())),
    };
    let tol = match cfg.tolerances.resolve() {
        Ok(t) => t,
        Err(e) => return usage_result(e),
    };
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let dir = output
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("convexlab-out").join(&cfg.task));
    let started = RunInfo::now();
    let outcome = match run_task(&cfg, &tol, &base_dir) {
        Ok(o) => o,
        Err(TaskError::Usage(e)) => return usage_result(e),
        Err(TaskError::Failed(msg)) => {
            let mut o = Outcome::default();
            o.verdict("task-completed", false, msg.clone());
            o
        }
    };
    let info = RunInfo {
        task: &cfg.task,
        seed: cfg.seed,
        config_bytes: &bytes,
        config_path: &path.display().to_string(),
        tolerances: &tol,
        started,
    };
    if let Err(e) = write_artifacts(&dir, &info, &outcome) {
        return RunResult { code: EXIT_USAGE, outcome: Some(outcome), output: Some(dir.clone()), message: format!("{}: {e}", dir.display()) };
    }
    let failed: Vec<String> = outcome.verdicts.iter().filter(|v| !v.pass).map(|v| format!("{} ({})", v.name, v.detail)).collect();
    let (code, message) = if failed.is_empty() {
        (EXIT_PASS, format!("{}: all {} verdicts pass; artifacts in {}", cfg.task, outcome.verdicts.len(), dir.display()))
    } else {
        (EXIT_FAIL, format!("{}: failed verdicts: {}; artifacts in {}", cfg.task, failed.join("; "), dir.display()))
    };
    RunResult { code, outcome: Some(outcome), output: Some(dir), message }
}

/// `(task, randomized, description, [(key, type, default, meaning)])`
type TaskSchema = (&'static str, &'static str, &'static [(&'static str, &'static str, &'static str, &'static str)]);

const SCHEMAS: [TaskSchema; 8] = [
    (
        "transport-convergence",
        "iterated Jacobi-field transport against ODE parallel transport; uses [metric]",
        &[
            ("ks", "list of int >= 2", "[2, 4, 8, 16, 32, 64]", "iteration counts"),
            ("cases", "list of {point, velocity, length, vectors}", "unit geodesic along e0 from the chart center, vector e1", "geodesics and vectors"),
            ("compare", "[k_lo, k_hi]", "none", "require e(k_hi) <= e(k_lo) / reduction"),
            ("reduction", "float", "4.0", "factor for compare"),
            ("max-final-error", "float", "none", "bound on e(k_max)"),
        ],
    ),
    (
        "jet-check",
        "exact jet round trips and top-degree coefficients; needs seed",
        &[
            ("dim", "int 2..4", "3", "dimension"),
            ("order", "int 2..6", "4", "jet order k"),
            ("samples", "int", "10", "random jets per round trip"),
            ("spread", "int", "3", "coefficient range of random jets"),
        ],
    ),
    (
        "exceptional-scan",
        "irreducibility margins over unit directions at a point; uses [metric]",
        &[
            ("point", "list of float", "chart center", "base point"),
            ("order", "int", "4", "highest Jacobi operator order k"),
            ("grid", "int >= 32", "162", "direction grid size"),
            ("expect", "exceptional | not-exceptional | inconclusive", "none", "required verdict"),
        ],
    ),
    (
        "geodesic-scan",
        "exceptionality along geodesics; uses [metric]; needs seed when random > 0",
        &[
            ("geodesics", "list of {point, velocity, length}", "[]", "explicit geodesics (duration = length)"),
            ("random", "int", "0", "seeded random unit-speed geodesics near the chart center"),
            ("length", "float", "0.3", "length of random geodesics"),
            ("order", "int", "4", "highest Jacobi operator order k"),
            ("samples", "int >= 3", "5", "points per geodesic"),
            ("expect", "exceptional | not-exceptional | inconclusive", "none", "required verdict for every geodesic"),
        ],
    ),
    (
        "jet-survey",
        "direction margins of random curvature jets; needs seed",
        &[
            ("dim", "int 3..4", "3", "dimension"),
            ("order", "int 2..6", "6", "jet order k"),
            ("samples", "int", "100", "number of jets"),
            ("grid", "int >= 32", "162", "direction grid size"),
            ("min-generic-fraction", "float", "0.9 (none for order 2)", "lower bound on the fraction with margin above tolerances.margin"),
            ("max-generic-fraction", "float", "0.0 for order 2, else none", "upper bound on that fraction"),
        ],
    ),
    (
        "hull-iterate",
        "geodesic hull iteration of a point cloud; uses [metric]; needs seed",
        &[
            ("points", "list of points", "required", "initial cloud"),
            ("rounds", "int", "3", "closure level"),
            ("h", "float", "chart edge / 200", "net resolution"),
            ("density", "int", "2000", "geodesic pairs per round"),
        ],
    ),
    (
        "key-lemma-audit",
        "cone parallelism and conditions (a), (b) along a boundary geodesic; needs [body]",
        &[
            ("point", "list of float", "seeded boundary sample", "start of the boundary geodesic"),
            ("length", "float", "0.4", "geodesic length"),
            ("samples", "int >= 2", "5", "audit points"),
            ("directions", "int >= 64", "64", "cone probe directions"),
            ("t0", "float", "0.1", "probe scale"),
            ("expect-refusal", "bool", "false", "pass iff no boundary geodesic exists"),
        ],
    ),
    (
        "strict-convexity-audit",
        "extreme-point classification of boundary samples; needs [body] and seed",
        &[
            ("samples", "int", "20", "boundary samples"),
            ("directions", "int >= 64", "64", "probe directions"),
            ("t0", "float", "0.05", "probe scale"),
            ("expect-flagged", "bool", "false", "pass iff some point is non-extreme with rank other than 1"),
        ],
    ),
];

/// Task catalog with parameter schemas; the text is fixed.
pub fn list_tasks() -> String {
    debug_assert!(SCHEMAS.iter().map(|s| s.0).eq(TASKS.iter().copied()));
    let mut s = String::from(
        "Shared keys: task, output, seed; sections [metric] (name, dim, curvature, chart, half-width, profile, jet-file, base, amplitude, seed, radius, center), [body] (name, dim, radius, delta), [tolerances] (sym, curv, hom, cross, geo, jac, conj, margin, inv, tie).\n",
    );
    for (name, about, params) in SCHEMAS {
        s.push_str(&format!("\n{name}: {about}\n  [{name}]\n"));
        for (key, ty, default, meaning) in params {
            s.push_str(&format!("    {key} ({ty}; default {default}): {meaning}\n"));
        }
    }
    s
}
