use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{bad, TaskError};
use crate::config::{JetSurveySpec, RunConfig};
use crate::report::{num, vec_str, Outcome, Table};
use convexlab::exceptional::{random_jet_survey, scan_directions, scan_geodesic, Verdict};
use convexlab::geodesic::shoot_geodesic;
use convexlab::Tolerances;

fn parse_expect(s: &Option<String>) -> Result<Option<Verdict>, TaskError> {
    match s.as_deref() {
        None => Ok(None),
        Some("exceptional") => Ok(Some(Verdict::Exceptional)),
        Some("not-exceptional") => Ok(Some(Verdict::NotExceptional)),
        Some("inconclusive") => Ok(Some(Verdict::Inconclusive)),
        Some(other) => bad(format!("expect: unknown verdict `{other}` (exceptional, not-exceptional, inconclusive)")),
    }
}

fn expectation(out: &mut Outcome, expect: Option<Verdict>, got: &[Verdict]) {
    match expect {
        Some(e) => {
            let bad = got.iter().filter(|v| **v != e).count();
            out.verdict("expected-verdict", bad == 0, format!("{bad} of {} differ from {}", got.len(), e.as_str()));
        }
        None => out.verdict("completed", true, "no expectation configured"),
    }
}

pub fn exceptional_scan(cfg: &RunConfig, tol: &Tolerances, base_dir: &Path) -> Result<Outcome, TaskError> {
    let spec = cfg.exceptional_scan.clone().unwrap_or_default();
    let metric = cfg.metric.build(base_dir)?;
    let p = spec.point.clone().unwrap_or_else(|| metric.domain().center());
    let k = spec.order.unwrap_or(4);
    let grid = spec.grid.unwrap_or(162);
    let expect = parse_expect(&spec.expect)?;
    let scan = scan_directions(&metric, &p, k, grid, tol)?;
    let verdict = scan.verdict(tol);
    let mut out = Outcome::default();
    let mut table = Table::new("directions", &["sample", "direction", "margin"]);
    for (i, s) in scan.samples.iter().enumerate() {
        table.push(vec![i.to_string(), vec_str(&s.direction), num(s.margin)]);
    }
    out.tables.push(table);
    expectation(&mut out, expect, &[verdict]);
    out.detail("verdict", json!(verdict.as_str()));
    out.detail("point", json!(p));
    out.detail("order", json!(k));
    out.detail("min_margin", json!(scan.min_margin));
    out.detail("argmin", json!(scan.argmin));
    out.detail("exceptional_directions", json!(scan.exceptional));
    Ok(out)
}

pub fn geodesic_scan(cfg: &RunConfig, tol: &Tolerances, base_dir: &Path) -> Result<Outcome, TaskError> {
    let spec = cfg.geodesic_scan.clone().unwrap_or_default();
    let metric = Arc::new(cfg.metric.build(base_dir)?);
    let k = spec.order.unwrap_or(4);
    let samples = spec.samples.unwrap_or(5);
    let expect = parse_expect(&spec.expect)?;
    let m = metric.dim();
    // (point, velocity, duration)
    let mut jobs: Vec<(Vec<f64>, Vec<f64>, f64)> = spec.geodesics.iter().map(|g| (g.point.clone(), g.velocity.clone(), g.length)).collect();
    let random = spec.random.unwrap_or(0);
    if random > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
        let c = metric.domain().center();
        let spread = 0.1 * metric.domain().edge();
        let length = spec.length.unwrap_or(0.3);
        for _ in 0..random {
            let p: Vec<f64> = c.iter().map(|x| x + rng.gen_range(-spread..spread)).collect();
            let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n = metric.norm(&p, &v);
            jobs.push((p, v.iter().map(|x| x / n).collect(), length));
        }
    }
    if jobs.is_empty() {
        return bad("[geodesic-scan] needs `geodesics` or `random`");
    }
    let mut out = Outcome::default();
    let mut margins = Table::new("geodesic_margins", &["geodesic", "t", "margin"]);
    let mut summary = Table::new("geodesics", &["geodesic", "point", "velocity", "duration", "verdict", "min_margin", "candidates", "surviving_dims"]);
    let mut verdicts = Vec::new();
    for (i, (p, v, len)) in jobs.iter().enumerate() {
        let path = shoot_geodesic(&metric, p, v, *len, 64)?;
        let scan = scan_geodesic(&path, k, samples, tol)?;
        for (t, mg) in scan.times.iter().zip(&scan.margins) {
            margins.push(vec![i.to_string(), num(*t), num(*mg)]);
        }
        let min = scan.margins.iter().cloned().fold(f64::INFINITY, f64::min);
        let dims: Vec<String> = scan.surviving.iter().map(|s| s.dim.to_string()).collect();
        summary.push(vec![
            i.to_string(),
            vec_str(p),
            vec_str(v),
            num(*len),
            scan.verdict.as_str().into(),
            num(min),
            scan.candidates.to_string(),
            dims.join(" "),
        ]);
        verdicts.push(scan.verdict);
    }
    expectation(&mut out, expect, &verdicts);
    let count = |w: Verdict| verdicts.iter().filter(|v| **v == w).count();
    out.detail("exceptional", json!(count(Verdict::Exceptional)));
    out.detail("not_exceptional", json!(count(Verdict::NotExceptional)));
    out.detail("inconclusive", json!(count(Verdict::Inconclusive)));
    out.tables.push(summary);
    out.tables.push(margins);
    Ok(out)
}

pub fn jet_survey(spec: JetSurveySpec, seed: u64, tol: &Tolerances) -> Result<Outcome, TaskError> {
    let m = spec.dim.unwrap_or(3);
    let k = spec.order.unwrap_or(6);
    let samples = spec.samples.unwrap_or(100);
    let grid = spec.grid.unwrap_or(162);
    let survey = random_jet_survey(m, k, samples, seed, grid, tol)?;
    // failed samples count against the generic fraction
    let generic = survey.rows.iter().filter(|r| matches!(r.min_margin, Some(v) if v > tol.margin)).count() as f64 / samples.max(1) as f64;
    let mut out = Outcome::default();
    let mut table = Table::new("survey", &["sample", "min_margin", "argmin", "error"]);
    for r in &survey.rows {
        table.push(vec![
            r.sample.to_string(),
            r.min_margin.map(num).unwrap_or_default(),
            r.argmin.as_deref().map(vec_str).unwrap_or_default(),
            r.error.clone().unwrap_or_default(),
        ]);
    }
    out.tables.push(table);
    out.verdict("no-failed-samples", survey.failures() == 0, format!("{} failed samples", survey.failures()));
    // with k = 2 every direction carries a single operator, which is always reducible
    let (lo, hi) = match (spec.min_generic_fraction, spec.max_generic_fraction) {
        (None, None) if k == 2 => (None, Some(0.0)),
        (None, None) => (Some(0.9), None),
        pair => pair,
    };
    if let Some(lo) = lo {
        out.verdict("generic-fraction-min", generic >= lo, format!("fraction with margin > {:e}: {generic}, need ≥ {lo}", tol.margin));
    }
    if let Some(hi) = hi {
        out.verdict("generic-fraction-max", generic <= hi, format!("fraction with margin > {:e}: {generic}, need ≤ {hi}", tol.margin));
    }
    out.detail("dim", json!(m));
    out.detail("order", json!(k));
    out.detail("samples", json!(samples));
    out.detail("generic_fraction", json!(generic));
    out.detail("distribution", json!(survey.distribution()));
    Ok(out)
}
