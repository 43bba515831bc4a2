use std::path::Path;
use std::sync::Arc;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{bad, TaskError};
use crate::config::{JetCheckSpec, RunConfig};
use crate::report::{num, Outcome, Table};
use convexlab::jets::{inverse_rho, normalize_jet, random_curvature_jet, random_metric_jet, rho, top_degree_coefficient};
use convexlab::transport::{transport_convergence_report, TransportCase};

/// Errors at or below this count as exact (flat metrics).
const EXACT: f64 = 1e-12;

fn unit_vector(metric: &convexlab::manifold::MetricField, p: &[f64], i: usize) -> Vec<f64> {
    let mut v = vec![0.0; metric.dim()];
    v[i % metric.dim()] = 1.0;
    let n = metric.norm(p, &v);
    v.iter().map(|x| x / n).collect()
}

pub fn transport_convergence(cfg: &RunConfig, base_dir: &Path) -> Result<Outcome, TaskError> {
    let spec = cfg.transport_convergence.clone().unwrap_or_default();
    let metric = Arc::new(cfg.metric.build(base_dir)?);
    let ks = spec.ks.clone().unwrap_or_else(|| vec![2, 4, 8, 16, 32, 64]);
    if ks.iter().any(|k| *k < 2) {
        return bad("[transport-convergence] ks must all be ≥ 2");
    }
    let cases: Vec<TransportCase> = if spec.cases.is_empty() {
        let p = metric.domain().center();
        vec![TransportCase {
            velocity: unit_vector(&metric, &p, 0),
            vectors: vec![unit_vector(&metric, &p, 1)],
            point: p,
            length: 1.0,
        }]
    } else {
        spec.cases
            .iter()
            .map(|c| TransportCase { point: c.point.clone(), velocity: c.velocity.clone(), length: c.length, vectors: c.vectors.clone() })
            .collect()
    };
    let reports = transport_convergence_report(&metric, &cases, &ks);
    let mut out = Outcome::default();
    let mut table = Table::new("transport", &["case", "vector", "k", "error", "message"]);
    let mut converging = true;
    let mut worst_final: f64 = 0.0;
    for r in &reports {
        for row in &r.rows {
            let (e, msg) = match &row.error {
                Ok(e) => (num(*e), String::new()),
                Err(m) => (String::new(), m.clone()),
            };
            table.push(vec![r.case.to_string(), r.vector.to_string(), row.k.to_string(), e, msg]);
        }
        let errs: Vec<Option<f64>> = r.rows.iter().map(|row| row.error.clone().ok()).collect();
        let exact = errs.iter().all(|e| matches!(e, Some(x) if *x <= EXACT));
        converging &= r.decreasing || exact;
        match errs.last().copied().flatten() {
            Some(e) => worst_final = worst_final.max(e),
            None => worst_final = f64::INFINITY,
        }
    }
    out.verdict("converging", converging, "errors decrease with k, or vanish to 1e-12");
    if let Some([lo, hi]) = spec.compare {
        let factor = spec.reduction.unwrap_or(4.0);
        let ok = reports.iter().all(|r| match (r.error(lo), r.error(hi)) {
            (Some(a), Some(b)) => b <= a / factor || b <= EXACT,
            _ => false,
        });
        out.verdict("reduction", ok, format!("e({hi}) <= e({lo}) / {factor}"));
    }
    if let Some(bound) = spec.max_final_error {
        out.verdict("final-error", worst_final <= bound, format!("max e(k_max) = {worst_final:e}, bound {bound:e}"));
    }
    out.detail("metric", json!(metric.name()));
    out.detail("ks", json!(ks));
    out.detail("max_final_error", json!(worst_final));
    out.tables.push(table);
    Ok(out)
}

/// The stated constant `−2(k−1)/(k+1)` and the factorial form `−2(k−1)/(k+1)!`.
fn stated_coefficient(k: usize) -> Ratio<i64> {
    Ratio::new(-2 * (k as i64 - 1), k as i64 + 1)
}

fn factorial_coefficient(k: usize) -> Ratio<i64> {
    let f: i64 = (1..=(k as i64 + 1)).product();
    Ratio::new(-2 * (k as i64 - 1), f)
}

pub fn jet_check(spec: JetCheckSpec, seed: u64) -> Result<Outcome, TaskError> {
    let m = spec.dim.unwrap_or(3);
    let k = spec.order.unwrap_or(4);
    let samples = spec.samples.unwrap_or(10);
    let spread = spec.spread.unwrap_or(3);
    if !(2..=4).contains(&m) || !(2..=6).contains(&k) {
        return bad("[jet-check] needs 2 <= dim <= 4 and 2 <= order <= 6");
    }
    let mut out = Outcome::default();
    let mut table = Table::new("jet_check", &["check", "order", "sample", "expected", "measured", "pass"]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut normal_ok, mut curv_ok) = (0, 0);
    for s in 0..samples {
        let g = normalize_jet(&random_metric_jet(m, k, &mut rng, spread))?;
        let ok = inverse_rho(&rho(&g)?)? == g;
        normal_ok += ok as usize;
        table.push(vec!["inverse-rho-after-rho".into(), k.to_string(), s.to_string(), "identity".into(), String::new(), ok.to_string()]);
        let r = random_curvature_jet(m, k, &mut rng, spread)?;
        let ok = rho(&inverse_rho(&r)?)? == r;
        curv_ok += ok as usize;
        table.push(vec!["rho-after-inverse-rho".into(), k.to_string(), s.to_string(), "identity".into(), String::new(), ok.to_string()]);
    }
    out.verdict("round-trip-normal", normal_ok == samples, format!("{normal_ok}/{samples} exact"));
    out.verdict("round-trip-curvature", curv_ok == samples, format!("{curv_ok}/{samples} exact"));
    let mut coefficients = Vec::new();
    for deg in 2..=k {
        let c = top_degree_coefficient(m, deg)?.to_string();
        let stated = stated_coefficient(deg).to_string();
        let fact = factorial_coefficient(deg).to_string();
        table.push(vec!["stated-coefficient".into(), deg.to_string(), String::new(), stated.clone(), c.clone(), (c == stated).to_string()]);
        table.push(vec!["factorial-coefficient".into(), deg.to_string(), String::new(), fact.clone(), c.clone(), (c == fact).to_string()]);
        out.verdict(format!("stated-coefficient-k{deg}"), c == stated, format!("G^{deg} = {c} R^{deg}; stated {stated}"));
        coefficients.push(json!({"order": deg, "measured": c, "stated": stated, "factorial_form": fact}));
    }
    out.detail("dim", json!(m));
    out.detail("order", json!(k));
    out.detail("coefficients", json!(coefficients));
    out.tables.push(table);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_forms() {
        assert_eq!(stated_coefficient(2).to_string(), "-2/3");
        assert_eq!(factorial_coefficient(2).to_string(), "-1/3");
        assert_eq!(factorial_coefficient(4).to_string(), "-1/20");
    }
}
