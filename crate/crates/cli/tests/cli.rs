use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_convexlab"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(config: &Path, out: &Path) -> (i32, String) {
    let o = bin().arg("run").arg(config).arg("--output").arg(out).output().unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stderr).into_owned())
}

fn summary(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn list_tasks_is_stable_and_complete() {
    let a = bin().arg("list-tasks").output().unwrap();
    let b = bin().arg("list-tasks").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let tasks: Vec<&str> = text.lines().filter(|l| !l.starts_with(' ') && l.contains(": ") && !l.starts_with("Shared")).collect();
    assert_eq!(tasks.len(), 8, "{text}");
    let survey = text.split("\njet-survey:").nth(1).unwrap().split("\n\n").next().unwrap();
    assert!(survey.contains("needs seed"));
}

#[test]
fn flat_transport_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t.toml", "task = \"transport-convergence\"\n[metric]\nname = \"euclidean\"\ndim = 3\n");
    let out = dir.path().join("out");
    let (code, msg) = run(&cfg, &out);
    assert_eq!(code, 0, "{msg}");
    let csv = std::fs::read_to_string(out.join("transport.csv")).unwrap();
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let e: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(e <= 1e-12);
        rows += 1;
    }
    assert_eq!(rows, 6);
    let s = summary(&out);
    assert_eq!(s["all_pass"], Value::Bool(true));
    assert_eq!(s["tolerances"]["margin"], 1e-7);
    assert!(s["repro"]["config_sha256"].as_str().unwrap().len() == 64);
    let repro = std::fs::read_to_string(out.join("repro.txt")).unwrap();
    assert!(repro.contains("seed: none") && repro.contains("config-sha256: "));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cases = [
        ("unknown-task.toml", "task = \"fly\"\n", "unknown task"),
        ("unknown-key.toml", "task = \"transport-convergence\"\ncolour = 3\n", "line 2"),
        ("bad-toml.toml", "task = \"jet-check\"\nseed = \n", "line 2"),
        ("no-seed.toml", "task = \"jet-survey\"\n", "seed"),
        ("wrong-section.toml", "task = \"jet-check\"\nseed = 1\n[jet-survey]\norder = 3\n", "does not belong"),
        ("bad-metric.toml", "task = \"exceptional-scan\"\n[metric]\nname = \"torus\"\ndim = 3\n", "torus"),
        ("nested-key.toml", "task = \"exceptional-scan\"\n[exceptional-scan]\nordr = 3\n", "line 3"),
    ];
    for (name, text, needle) in cases {
        let cfg = write_config(dir.path(), name, text);
        let (code, msg) = run(&cfg, &out);
        assert_eq!(code, 2, "{name}: {msg}");
        assert!(msg.contains(needle), "{name}: {msg}");
    }
    let (code, _) = run(&dir.path().join("missing.toml"), &out);
    assert_eq!(code, 2);
    let o = bin().arg("frobnicate").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let cfg = write_config(dir.path(), "ok.toml", "task = \"transport-convergence\"\n");
    let o = bin().env("CONVEXLAB_THREADS", "zero").arg("run").arg(&cfg).arg("-o").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_verdict_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.toml",
        "task = \"exceptional-scan\"\n[metric]\nname = \"round-sphere\"\ndim = 3\n[exceptional-scan]\norder = 3\ngrid = 32\nexpect = \"not-exceptional\"\n",
    );
    let out = dir.path().join("out");
    let (code, msg) = run(&cfg, &out);
    assert_eq!(code, 1, "{msg}");
    let s = summary(&out);
    assert_eq!(s["all_pass"], Value::Bool(false));
    assert_eq!(s["details"]["verdict"], "exceptional");
}

#[test]
fn jet_check_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "j.toml", "task = \"jet-check\"\nseed = 3\n[jet-check]\ndim = 3\norder = 4\nsamples = 3\n");
    let out = dir.path().join("out");
    run(&cfg, &out);
    let s = summary(&out);
    let verdicts = s["verdicts"].as_array().unwrap();
    let get = |n: &str| verdicts.iter().find(|v| v["name"] == n).unwrap()["pass"].as_bool().unwrap();
    assert!(get("round-trip-normal"));
    assert!(get("round-trip-curvature"));
    let coeffs = s["details"]["coefficients"].as_array().unwrap();
    assert_eq!(coeffs[0]["measured"], "-1/3");
}

#[test]
fn seeded_runs_reproduce_csv_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        ("hull.toml", "task = \"hull-iterate\"\nseed = 4\n[metric]\nname = \"round-sphere\"\ndim = 2\n[hull-iterate]\npoints = [[0.0, 0.0], [0.2, 0.05], [0.05, 0.2]]\nrounds = 2\nh = 0.03\ndensity = 300\n"),
        ("survey.toml", "task = \"jet-survey\"\nseed = 9\n[jet-survey]\norder = 4\nsamples = 4\ngrid = 32\n"),
    ];
    for (name, text) in configs {
        let cfg = write_config(dir.path(), name, text);
        let (a, b) = (dir.path().join(format!("{name}-a")), dir.path().join(format!("{name}-b")));
        run(&cfg, &a);
        let o = bin().env("CONVEXLAB_THREADS", "1").arg("run").arg(&cfg).arg("-o").arg(&b).output().unwrap();
        assert!(o.status.code().unwrap() <= 1);
        let mut tables = 0;
        for entry in std::fs::read_dir(&a).unwrap() {
            let p = entry.unwrap().path();
            if p.extension().and_then(|e| e.to_str()) == Some("csv") {
                let other = b.join(p.file_name().unwrap());
                assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&other).unwrap(), "{}", p.display());
                tables += 1;
            }
        }
        assert!(tables >= 1);
        assert_eq!(std::fs::read(a.join("repro.txt")).unwrap(), std::fs::read(b.join("repro.txt")).unwrap());
    }
}

#[test]
fn hyperbolic_key_lemma_refuses() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "k.toml",
        "task = \"key-lemma-audit\"\n[body]\nname = \"hyperbolic-ball\"\n[key-lemma-audit]\nlength = 0.1\nexpect-refusal = true\n",
    );
    let out = dir.path().join("out");
    let (code, msg) = run(&cfg, &out);
    assert_eq!(code, 0, "{msg}");
    assert_eq!(summary(&out)["details"]["refused"], Value::Bool(true));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        convexlab_cli::config::RunConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        n += 1;
    }
    assert!(n >= 8);
}
