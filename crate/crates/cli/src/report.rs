//! Task outcomes and the artifacts written for them.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::config::tolerance_pairs;
use convexlab::Tolerances;

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Verdict { name: name.into(), pass, detail: detail.into() }
    }
}

/// A CSV file: `<name>.csv` with a header row.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub verdicts: Vec<Verdict>,
    pub tables: Vec<Table>,
    /// task-specific summary fields
    pub details: Map<String, Value>,
}

impl Outcome {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn verdict(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict::new(name, pass, detail));
    }

    pub fn detail(&mut self, key: &str, value: Value) {
        self.details.insert(key.into(), value);
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

/// Shortest round-trip decimal; identical across runs and platforms.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn vec_str(v: &[f64]) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ")
}

pub fn config_hash(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

pub struct RunInfo<'a> {
    pub task: &'a str,
    pub seed: Option<u64>,
    pub config_bytes: &'a [u8],
    pub config_path: &'a str,
    pub tolerances: &'a Tolerances,
    pub started: f64,
}

impl<'a> RunInfo<'a> {
    pub fn now() -> f64 {
        unix_now()
    }
}

/// Writes every table, `summary.json` and `repro.txt` into `dir`.
pub fn write_artifacts(dir: &Path, info: &RunInfo, outcome: &Outcome) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for t in &outcome.tables {
        std::fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv())?;
    }
    let finished = unix_now();
    let tolerances: Map<String, Value> = tolerance_pairs(info.tolerances).into_iter().map(|(k, v)| (k.into(), json!(v))).collect();
    let hash = config_hash(info.config_bytes);
    let summary = json!({
        "task": info.task,
        "all_pass": outcome.all_pass(),
        "verdicts": outcome.verdicts.iter().map(|v| json!({"name": v.name, "pass": v.pass, "detail": v.detail})).collect::<Vec<_>>(),
        "tolerances": tolerances,
        "details": outcome.details,
        "files": outcome.tables.iter().map(|t| format!("{}.csv", t.name)).collect::<Vec<_>>(),
        "repro": {
            "seed": info.seed,
            "version": env!("CARGO_PKG_VERSION"),
            "config_sha256": hash,
        },
        "started_unix": info.started,
        "finished_unix": finished,
        "elapsed_s": finished - info.started,
    });
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary).expect("json") + "\n")?;
    let seed = info.seed.map(|s| s.to_string()).unwrap_or_else(|| "none".into());
    let repro = format!(
        "task: {}\nseed: {seed}\nversion: {}\nconfig: {}\nconfig-sha256: {hash}\nrerun: convexlab run {}\n",
        info.task,
        env!("CARGO_PKG_VERSION"),
        info.config_path,
        info.config_path
    );
    std::fs::write(dir.join("repro.txt"), repro)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_and_headers() {
        let mut t = Table::new("x", &["a", "b"]);
        t.push(vec!["1".into(), "p, q".into()]);
        assert_eq!(t.to_csv(), "a,b\n1,\"p, q\"\n");
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1e-300, -2.5e17, 1.0 / 3.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(vec_str(&[1.0, -0.5]), "1 -0.5");
    }

    #[test]
    fn hash_is_sha256() {
        assert_eq!(config_hash(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
