use std::path::Path;
use std::sync::Arc;

use serde_json::json;

use super::{bad, TaskError};
use crate::config::RunConfig;
use crate::report::{num, vec_str, Outcome, Table};
use convexlab::convex::flat::hull_agreement;
use convexlab::convex::{
    boundary_points, catalog_body, directed_hausdorff, find_boundary_geodesic, hull_iterate, key_lemma_audit, strict_convexity_audit,
    AuditOptions, ConvexBody, HullOptions, Net,
};
use convexlab::Error;

fn body(cfg: &RunConfig, base_dir: &Path) -> Result<ConvexBody, TaskError> {
    let spec = cfg.body.as_ref().expect("validated: body present");
    let params = spec.params(&cfg.metric, base_dir, cfg.seed.unwrap_or(0))?;
    Ok(catalog_body(&spec.name, &params)?)
}

pub fn hull(cfg: &RunConfig, base_dir: &Path) -> Result<Outcome, TaskError> {
    let spec = cfg.hull_iterate.clone().expect("validated: section present");
    let metric = Arc::new(cfg.metric.build(base_dir)?);
    let rounds = spec.rounds.unwrap_or(3);
    let h = spec.h.unwrap_or(metric.domain().edge() / 200.0);
    let opts = HullOptions { h, density: spec.density.unwrap_or(2000), seed: cfg.seed.unwrap_or(0) };
    let report = hull_iterate(&metric, &spec.points, rounds, &opts)?;
    let mut out = Outcome::default();
    let mut table = Table::new("rounds", &["round", "points", "gap", "pairs", "ambiguous", "failed"]);
    table.push(vec!["0".into(), report.initial.len().to_string(), String::new(), String::new(), String::new(), String::new()]);
    for (i, r) in report.rounds.iter().enumerate() {
        table.push(vec![
            (i + 1).to_string(),
            r.cloud.len().to_string(),
            num(r.gap),
            r.pairs.to_string(),
            r.ambiguous.to_string(),
            r.failed.to_string(),
        ]);
    }
    out.tables.push(table);
    let m = metric.dim();
    let mut header: Vec<String> = vec!["index".into()];
    header.extend((0..m).map(|i| format!("x{i}")));
    let mut cloud = Table { name: "cloud".into(), header, rows: Vec::new() };
    for (i, p) in report.final_cloud().iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(p.iter().map(|x| num(*x)));
        cloud.push(row);
    }
    out.tables.push(cloud);

    let last = report.gaps().last().copied().unwrap_or(0.0);
    out.verdict("stabilized", last <= 2.0 * h, format!("last gap {last:e}, bound 2h = {:e}", 2.0 * h));
    let mut nested = true;
    let mut prev = report.initial.clone();
    for r in &report.rounds {
        let mut next = Net::new(h);
        for p in &r.cloud {
            next.insert(p.clone());
        }
        nested &= directed_hausdorff(&prev, &next) <= h;
        prev = r.cloud.clone();
    }
    out.verdict("nested", nested, "each round lies within h of the next");
    if metric.name() == "euclidean" && (2..=3).contains(&m) && spec.points.len() > m {
        let (outside, uncovered) = hull_agreement(&spec.points, &report.final_net(), 400, opts.seed);
        out.verdict(
            "classical-hull",
            outside <= 2.0 * h && uncovered <= 2.0 * h,
            format!("net-to-hull {outside:e}, hull-to-net {uncovered:e}, bound 2h"),
        );
    }
    out.detail("h", json!(h));
    out.detail("gaps", json!(report.gaps()));
    out.detail("final_points", json!(report.final_cloud().len()));
    Ok(out)
}

pub fn key_lemma(cfg: &RunConfig, base_dir: &Path) -> Result<Outcome, TaskError> {
    let spec = cfg.key_lemma_audit.clone().unwrap_or_default();
    let body = body(cfg, base_dir)?;
    let opts = AuditOptions {
        directions: spec.directions.unwrap_or(64),
        t0: spec.t0.unwrap_or(0.1),
        ..AuditOptions::default()
    };
    let p = match &spec.point {
        Some(p) => p.clone(),
        None => boundary_points(&body, 1, cfg.seed.unwrap_or(0))?.remove(0),
    };
    let length = spec.length.unwrap_or(0.4);
    let samples = spec.samples.unwrap_or(5);
    let expect_refusal = spec.expect_refusal.unwrap_or(false);
    let mut out = Outcome::default();
    out.detail("body", json!(body.name));
    out.detail("point", json!(p));
    let audit = find_boundary_geodesic(&body, &p, length, opts.directions).and_then(|path| key_lemma_audit(&body, &path, samples, &opts));
    let audit = match audit {
        Ok(a) => a,
        Err(Error::NoBoundaryGeodesic(msg)) => {
            out.verdict("refusal", expect_refusal, format!("no boundary geodesic: {msg}"));
            out.detail("refused", json!(true));
            out.tables.push(Table::new("audit", &["sample", "t", "rank", "cone_deviation", "condition_b"]));
            return Ok(out);
        }
        Err(e) => return Err(e.into()),
    };
    if expect_refusal {
        out.verdict("refusal", false, "a boundary geodesic was found");
    }
    let mut table = Table::new("audit", &["sample", "t", "rank", "cone_deviation", "condition_b"]);
    for j in 0..audit.times.len() {
        table.push(vec![j.to_string(), num(audit.times[j]), audit.ranks[j].to_string(), num(audit.cone_deviation[j]), num(audit.condition_b[j])]);
    }
    out.tables.push(table);
    out.verdict("parallel-cones", audit.parallel(), format!("max deviation {:e}, bound {:e}", audit.max_deviation(), audit.tol));
    out.verdict("condition-b", audit.max_condition_b() <= audit.tol, format!("max residual {:e}, bound {:e}", audit.max_condition_b(), audit.tol));
    out.verdict("condition-a", audit.condition_a_failures == 0, format!("{} failed probes", audit.condition_a_failures));
    out.detail("refused", json!(false));
    out.detail("ranks", json!(audit.ranks));
    Ok(out)
}

pub fn strict_convexity(cfg: &RunConfig, base_dir: &Path) -> Result<Outcome, TaskError> {
    let spec = cfg.strict_convexity_audit.clone().unwrap_or_default();
    let body = body(cfg, base_dir)?;
    let samples = spec.samples.unwrap_or(20);
    if samples == 0 {
        return bad("[strict-convexity-audit] samples must be positive");
    }
    let opts = AuditOptions { directions: spec.directions.unwrap_or(64), t0: spec.t0.unwrap_or(0.05), ..AuditOptions::default() };
    let report = strict_convexity_audit(&body, samples, cfg.seed.unwrap_or(0), &opts)?;
    let mut table = Table::new("boundary_points", &["sample", "point", "extreme", "rank", "flagged", "witness"]);
    for (i, p) in report.points.iter().enumerate() {
        table.push(vec![
            i.to_string(),
            vec_str(&p.point),
            p.extreme.to_string(),
            p.rank.map(|r| r.to_string()).unwrap_or_default(),
            p.flagged.to_string(),
            p.witness.as_deref().map(vec_str).unwrap_or_default(),
        ]);
    }
    let mut out = Outcome::default();
    out.tables.push(table);
    let flagged = report.flagged();
    let expect = spec.expect_flagged.unwrap_or(false);
    let detail = format!("{flagged} of {samples} points non-extreme with rank other than 1");
    out.verdict(if expect { "non-generic-signature" } else { "no-non-generic-signature" }, (flagged > 0) == expect, detail);
    out.detail("body", json!(body.name));
    out.detail("non_extreme", json!(report.non_extreme()));
    out.detail("flagged", json!(flagged));
    out.detail("t0", json!(report.t0));
    Ok(out)
}
