//! Acceptance criteria 1 to 12. Each test writes one `criterion N PASS|FAIL`
//! line to stderr (outside the test harness capture) and then asserts.

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use convexlab::convex::flat::hull_agreement;
use convexlab::convex::{catalog_body, find_boundary_geodesic, hull_iterate, key_lemma_audit, AuditOptions, BodyParams, HullOptions};
use convexlab::exceptional::brute::{brute_force_family, random_family};
use convexlab::exceptional::{analyze_family, exceptional_at, random_jet_survey, scan_geodesic, Verdict};
use convexlab::geodesic::shoot_geodesic;
use convexlab::jets::{
    admissible_basis, inverse_rho, normalize_jet, prescribe_jacobi, proportionality, random_curvature_jet, random_metric_jet, rho,
    rho_differential_rank, single_component_jet, MetricJet, Q,
};
use convexlab::manifold::stack::exact_stack;
use convexlab::manifold::{catalog_metric, jacobi_operator_stack, numerical_stack, CatalogParams, Matrix, MetricField};
use convexlab::transport::{jacobi_operator_along, pinched_quadratic_richardson, transport_convergence_report, TransportCase};
use convexlab::Tolerances;

fn report(n: usize, pass: bool, detail: String, started: Instant) {
    let line = format!("criterion {n:>2} {}: {detail} ({:.1}s)\n", if pass { "PASS" } else { "FAIL" }, started.elapsed().as_secs_f64());
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {n}: {detail}");
}

fn metric(name: &str, params: CatalogParams) -> Arc<MetricField> {
    Arc::new(catalog_metric(name, &params).unwrap())
}

fn q(n: i64) -> Q {
    Q::from_float(n as f64).unwrap()
}

fn frob(a: &Matrix<f64>) -> f64 {
    a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

fn random_point(rng: &mut ChaCha8Rng, metric: &MetricField, reach: f64) -> Vec<f64> {
    let c = metric.domain().center();
    let e = metric.domain().edge();
    c.iter().map(|x| x + reach * e * rng.gen_range(-1.0..1.0)).collect()
}

fn random_direction(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

#[test]
fn criterion_01_iterated_transport_convergence() {
    let t = Instant::now();
    let sphere = metric("round-sphere", CatalogParams { curvature: Some(1.0), ..CatalogParams::dim(3) });
    // conformal factor 1 on the unit circle of the stereographic chart: unit speed
    let case = TransportCase { point: vec![1.0, 0.0, 0.0], velocity: vec![0.0, 1.0, 0.0], length: 1.0, vectors: vec![vec![0.0, 0.0, 1.0]] };
    let r = &transport_convergence_report(&sphere, &[case], &[8, 64])[0];
    let (e8, e64) = (r.error(8).unwrap(), r.error(64).unwrap());
    let flat = metric("euclidean", CatalogParams::dim(3));
    let fcase = TransportCase { point: vec![0.1, -0.2, 0.3], velocity: vec![0.4, 0.5, -0.2], length: 1.0, vectors: vec![vec![1.0, 2.0, -0.5]] };
    let ks = [2, 3, 4, 8, 16, 32, 64];
    let fr = &transport_convergence_report(&flat, &[fcase], &ks)[0];
    let flat_max = ks.iter().map(|k| fr.error(*k).unwrap()).fold(0.0, f64::max);
    let ok_ratio = e64 <= e8 / 4.0;
    let ok_abs = e64 <= 1e-3;
    let ok_flat = flat_max <= 1e-12;
    let pass = ok_ratio && ok_abs && ok_flat && t.elapsed().as_secs_f64() < 10.0;
    report(
        1,
        pass,
        format!("sphere e(8) = {e8:.3e}, e(64) = {e64:.3e} (ratio ok: {ok_ratio}, e(64) <= 1e-3: {ok_abs}); flat max e(k) = {flat_max:.1e}"),
        t,
    );
}

#[test]
fn criterion_02_pinched_jacobi_expansion() {
    let t = Instant::now();
    let cases = [
        ("round-sphere", CatalogParams::dim(3)),
        ("hyperbolic-ball", CatalogParams::dim(3)),
        ("perturbed", CatalogParams { seed: 1, ..CatalogParams::dim(3) }),
        ("perturbed", CatalogParams { seed: 2, ..CatalogParams::dim(3) }),
    ];
    let mut worst: f64 = 0.0;
    let mut tangential_zero = true;
    for (name, params) in cases {
        let m = metric(name, params);
        let c = m.domain().center();
        let p: Vec<f64> = c.iter().zip([0.05, -0.03, 0.02]).map(|(a, b)| a + b).collect();
        let path = shoot_geodesic(&m, &p, &[0.3, 0.2, -0.1], 1.0, 16).unwrap();
        let a = 0.5;
        let (x, vel) = path.state_at(a).unwrap();
        let v = [0.1, -0.4, 0.7];
        let coeff: Vec<f64> = pinched_quadratic_richardson(&path, a, &v, 1e-2).unwrap().iter().map(|c| 0.5 * c).collect();
        let half_r2: Vec<f64> = jacobi_operator_along(&path, a, &v).unwrap().iter().map(|c| 0.5 * c).collect();
        let d: Vec<f64> = coeff.iter().zip(&half_r2).map(|(a, b)| a - b).collect();
        worst = worst.max(m.norm(&x, &d) / m.norm(&x, &half_r2));
        let along = pinched_quadratic_richardson(&path, a, &vel, 1e-2).unwrap();
        tangential_zero &= along.iter().all(|c| *c == 0.0);
    }
    let pass = worst <= 1e-3 && tangential_zero && t.elapsed().as_secs_f64() < 10.0;
    report(2, pass, format!("max relative deviation from R²v/2 = {worst:.2e} (bound 1e-3); v = γ' gives exactly 0: {tangential_zero}"), t);
}

#[test]
fn criterion_03_jacobi_operator_identities() {
    let t = Instant::now();
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let metrics = [
        metric("round-sphere", CatalogParams::dim(3)),
        metric("hyperbolic-ball", CatalogParams::dim(3)),
        metric("product-sphere-line", CatalogParams::dim(3)),
        metric("revolution-product", CatalogParams::dim(3)),
        metric("perturbed", CatalogParams { seed: 11, ..CatalogParams::dim(3) }),
    ];
    let (mut samples, mut bad) = (0, 0);
    let (mut worst_sym, mut worst_kill, mut worst_hom): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for round in 0..25 {
        for m in &metrics {
            let p = random_point(&mut rng, m, 0.2);
            let x = random_direction(&mut rng, 3);
            let s = jacobi_operator_stack(m, &p, &x, 5).unwrap();
            let xn = s.x_hat.iter().map(|v| v * v).sum::<f64>().sqrt();
            let scaled: Vec<_> = [-1.0, 0.5, 2.0]
                .iter()
                .map(|l| (*l, jacobi_operator_stack(m, &p, &x.iter().map(|v| l * v).collect::<Vec<_>>(), 5).unwrap()))
                .collect();
            // operators that vanish identically come out at roundoff size; the
            // relative checks are taken against the size of the whole stack
            let scale = (2..=5).map(|i| frob(s.operator(i))).fold(0.0, f64::max);
            for i in 2..=5 {
                let a = s.operator(i);
                let na = frob(a).max(scale);
                let sym = (0..3).flat_map(|r| (0..3).map(move |c| (r, c))).map(|(r, c)| (a[r][c] - a[c][r]).powi(2)).sum::<f64>().sqrt();
                let ax: f64 = a.iter().map(|row| row.iter().zip(&s.x_hat).map(|(u, v)| u * v).sum::<f64>().powi(2)).sum::<f64>().sqrt();
                let kill = if na > 0.0 { ax / (na * xn) } else { ax };
                let mut hom: f64 = 0.0;
                for (l, sl) in &scaled {
                    let b = sl.operator(i);
                    let li = l.powi(i as i32);
                    let d: f64 = a.iter().flatten().zip(b.iter().flatten()).map(|(u, v)| (v - li * u).powi(2)).sum::<f64>().sqrt();
                    hom = hom.max(if na > 0.0 { d / (li.abs() * na) } else { d });
                }
                worst_sym = worst_sym.max(sym);
                worst_kill = worst_kill.max(kill);
                worst_hom = worst_hom.max(hom);
                bad += (sym > tol.sym || kill > tol.sym || hom > tol.hom) as usize;
                samples += 1;
            }
        }
        let _ = round;
    }
    // exact identities on jet metrics, in rational arithmetic
    let mut exact_bad = 0;
    let mut exact_samples = 0;
    for s in 0..10 {
        let m = 2 + s % 2;
        let r = random_curvature_jet(m, 5, &mut rng, 3).unwrap();
        let g = inverse_rho(&r).unwrap();
        let field = MetricField::from_jet(&g, 0.05).unwrap();
        let x: Vec<Q> = (0..m).map(|_| q(rng.gen_range(-3..=3))).collect();
        if x.iter().all(|c| *c == q(0)) {
            continue;
        }
        let ops = exact_stack(&field, &x, 5).unwrap();
        let x2: Vec<Q> = x.iter().map(|c| c * q(2)).collect();
        let ops2 = exact_stack(&field, &x2, 5).unwrap();
        for (i, a) in ops.iter().enumerate() {
            let deg = i + 2;
            let sym = (0..m).all(|u| (0..m).all(|v| a[u][v] == a[v][u]));
            let kill = a.iter().all(|row| row.iter().zip(&x).map(|(u, v)| u * v).fold(q(0), |s, t| s + t) == q(0));
            let f = q(1 << deg);
            let hom = a.iter().flatten().zip(ops2[i].iter().flatten()).all(|(u, v)| *v == u * &f);
            exact_bad += (!(sym && kill && hom)) as usize;
            exact_samples += 1;
        }
    }
    let pass = samples >= 500 && bad == 0 && exact_bad == 0 && t.elapsed().as_secs_f64() < 60.0;
    report(
        3,
        pass,
        format!(
            "{samples} numerical samples, {bad} violations (max sym {worst_sym:.1e}, max |Rx|/(|R||x|) {worst_kill:.1e}, max homogeneity {worst_hom:.1e}); {exact_samples} exact jet samples, {exact_bad} violations"
        ),
        t,
    );
}

#[test]
fn criterion_04_top_degree_coefficient() {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0;
    for m in 2..=3 {
        for k in 2..=6usize {
            let stated = q(-2 * (k as i64 - 1)) / q(k as i64 + 1);
            for b in admissible_basis(m, k).iter() {
                let r = rho(&single_component_jet(m, k, b.clone())).unwrap();
                let c = proportionality(b, r.component(k));
                checked += 1;
                if c.as_ref() != Some(&stated) {
                    let got = c.map(|c| c.to_string()).unwrap_or_else(|| "not proportional".into());
                    if !failures.iter().any(|f: &String| f.starts_with(&format!("m={m} k={k}:"))) {
                        failures.push(format!("m={m} k={k}: measured {got}, stated {stated}"));
                    }
                }
            }
        }
    }
    let pass = failures.is_empty() && t.elapsed().as_secs_f64() < 60.0;
    let detail = if failures.is_empty() { format!("{checked} basis jets match") } else { format!("{checked} basis jets; {}", failures.join("; ")) };
    report(4, pass, detail, t);
}

#[test]
fn criterion_05_rho_round_trips_and_rank() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut trips, mut bad) = (0, 0);
    for s in 0..50 {
        let m = 2 + s % 2;
        let k = 2 + s % 4;
        let r = random_curvature_jet(m, k, &mut rng, 3).unwrap();
        bad += (rho(&inverse_rho(&r).unwrap()).unwrap() != r) as usize;
        let g = normalize_jet(&random_metric_jet(m, k, &mut rng, 3)).unwrap();
        bad += (inverse_rho(&rho(&g).unwrap()).unwrap() != g) as usize;
        trips += 2;
    }
    let (m, k) = (3, 4);
    let mut bases = vec![MetricJet::zero(m, k)];
    for _ in 0..5 {
        bases.push(random_metric_jet(m, k, &mut rng, 2));
    }
    let mut rank_bad = 0;
    let mut dims = (0, 0);
    for b in &bases {
        let rep = rho_differential_rank(b, k).unwrap();
        dims = (rep.rank, rep.dim_curvature_jets);
        rank_bad += !rep.is_submersion() as usize;
    }
    let pass = bad == 0 && rank_bad == 0 && t.elapsed().as_secs_f64() < 300.0;
    report(5, pass, format!("{trips} exact round trips, {bad} mismatches; rank {} = dim R^{k} = {} at zero + 5 random bases (m={m}), {rank_bad} deficient", dims.0, dims.1), t);
}

/// Symmetric rational operator on `R^3` killing `x`, from two vectors spanning `x⊥`.
fn admissible_operator(x: &[Q], rng: &mut ChaCha8Rng) -> Vec<Vec<Q>> {
    let cross = |a: &[Q], b: &[Q]| vec![&a[1] * &b[2] - &a[2] * &b[1], &a[2] * &b[0] - &a[0] * &b[2], &a[0] * &b[1] - &a[1] * &b[0]];
    let e = if x[0] == q(0) && x[1] == q(0) { vec![q(1), q(0), q(0)] } else { vec![q(0), q(0), q(1)] };
    let b1 = cross(x, &e);
    let b2 = cross(x, &b1);
    let c: Vec<Q> = (0..3).map(|_| q(rng.gen_range(-4..=4))).collect();
    (0..3)
        .map(|u| (0..3).map(|v| &c[0] * &b1[u] * &b1[v] + &c[1] * &b2[u] * &b2[v] + &c[2] * (&b1[u] * &b2[v] + &b2[u] * &b1[v])).collect())
        .collect()
}

#[test]
fn criterion_06_prescription() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut exact_bad, mut worst): (usize, f64) = (0, 0.0);
    let mut tuples = 0;
    while tuples < 50 {
        let x: Vec<Q> = (0..3).map(|_| q(rng.gen_range(-2..=2))).collect();
        if x.iter().all(|c| *c == q(0)) {
            continue;
        }
        let ops: Vec<Vec<Vec<Q>>> = (0..3).map(|_| admissible_operator(&x, &mut rng)).collect();
        let jet = prescribe_jacobi(&x, &ops).unwrap();
        let field = MetricField::from_jet(&jet, 0.02).unwrap();
        exact_bad += (exact_stack(&field, &x, 4).unwrap() != ops) as usize;
        let xf: Vec<f64> = x.iter().map(|c| c.to_string().parse::<f64>().unwrap()).collect();
        let n = numerical_stack(&field, &[0.0; 3], &xf, 4).unwrap();
        for (i, a) in ops.iter().enumerate() {
            let af: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|c| rat_f64(c)).collect()).collect();
            let d: f64 = af.iter().flatten().zip(n.operator(i + 2).iter().flatten()).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
            worst = worst.max(d / frob(&af).max(1.0));
        }
        tuples += 1;
    }
    let pass = exact_bad == 0 && worst <= 1e-5 && t.elapsed().as_secs_f64() < 300.0;
    report(6, pass, format!("{tuples} tuples (A2, A3, A4), {exact_bad} exact mismatches, max numerical deviation {worst:.1e} (bound 1e-5)"), t);
}

fn rat_f64(c: &Q) -> f64 {
    let s = c.to_string();
    match s.split_once('/') {
        Some((n, d)) => n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap(),
        None => s.parse().unwrap(),
    }
}

#[test]
fn criterion_07_commutant_matches_brute_force() {
    let t = Instant::now();
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut disagree, mut inconclusive, mut exceptional) = (0, 0, 0);
    let trials = 1000;
    for trial in 0..trials {
        let m = 3 + trial % 2;
        let count = rng.gen_range(1..=3);
        let reducible = rng.gen_bool(0.4);
        let (ops, x) = random_family(&mut rng, m, count, reducible);
        let r = analyze_family(&ops, &x, &tol).unwrap();
        let brute = brute_force_family(&ops, &x).unwrap();
        exceptional += brute as usize;
        match r.verdict {
            Verdict::Inconclusive => inconclusive += 1,
            v => disagree += ((v == Verdict::Exceptional) != brute) as usize,
        }
    }
    let pass = disagree == 0 && t.elapsed().as_secs_f64() < 60.0;
    report(7, pass, format!("{trials} families (n = 2, 3): {disagree} disagreements, {inconclusive} inconclusive, {exceptional} reducible by brute force"), t);
}

#[test]
fn criterion_08_exceptional_metrics() {
    let t = Instant::now();
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut model_bad = 0;
    let mut model_checks = 0;
    for name in ["euclidean", "round-sphere", "hyperbolic-ball"] {
        let m = metric(name, CatalogParams::dim(3));
        for _ in 0..4 {
            let p = random_point(&mut rng, &m, 0.2);
            let x = random_direction(&mut rng, 3);
            for k in 2..=6 {
                let r = exceptional_at(&m, &p, &x, k, &tol).unwrap();
                model_bad += (r.verdict != Verdict::Exceptional) as usize;
                model_checks += 1;
            }
        }
    }
    // hemisphere × line: the equator keeps span{γ', line}
    let product = metric("product-sphere-line", CatalogParams::dim(3));
    let path = shoot_geodesic(&product, &[0.0; 3], &[1.0, 0.0, 0.0], 1.0, 32).unwrap();
    let scan = scan_geodesic(&path, 4, 5, &tol).unwrap();
    let in_span = |basis: &[Vec<f64>], v: &[f64]| {
        let mut r = v.to_vec();
        let mut q: Vec<Vec<f64>> = Vec::new();
        for b in basis {
            let mut u = b.clone();
            for e in &q {
                let d: f64 = u.iter().zip(e).map(|(a, b)| a * b).sum();
                u.iter_mut().zip(e).for_each(|(a, b)| *a -= d * b);
            }
            let n = u.iter().map(|a| a * a).sum::<f64>().sqrt();
            q.push(u.iter().map(|a| a / n).collect());
        }
        for e in &q {
            let d: f64 = r.iter().zip(e).map(|(a, b)| a * b).sum();
            r.iter_mut().zip(e).for_each(|(a, b)| *a -= d * b);
        }
        r.iter().map(|a| a * a).sum::<f64>().sqrt() < 1e-8
    };
    let witness = scan.surviving.iter().any(|s| s.dim == 2 && in_span(&s.bases[0], &[0.0, 0.0, 1.0]) && in_span(&s.bases[0], &[1.0, 0.0, 0.0]));
    let product_ok = scan.verdict == Verdict::Exceptional && witness;
    // perturbed sphere: random geodesics near the chart center
    let perturbed = metric("perturbed", CatalogParams { seed: 7, ..CatalogParams::dim(3) });
    let mut rng = ChaCha8Rng::seed_from_u64(80);
    let (mut exc, mut low, mut min_margin) = (0, 0, f64::INFINITY);
    for _ in 0..50 {
        let p = random_point(&mut rng, &perturbed, 0.1);
        let v = random_direction(&mut rng, 3);
        let n = perturbed.norm(&p, &v);
        let v: Vec<f64> = v.iter().map(|c| c / n).collect();
        let path = shoot_geodesic(&perturbed, &p, &v, 0.3, 64).unwrap();
        let s = scan_geodesic(&path, 4, 4, &tol).unwrap();
        exc += (s.verdict == Verdict::Exceptional) as usize;
        low += s.margins.iter().filter(|m| **m <= tol.margin).count();
        min_margin = s.margins.iter().cloned().fold(min_margin, f64::min);
    }
    let pass = model_bad == 0 && product_ok && exc == 0 && low == 0 && t.elapsed().as_secs_f64() < 300.0;
    report(
        8,
        pass,
        format!(
            "constant curvature and flat: {model_bad}/{model_checks} non-exceptional; product equator {} with line plane witness {witness}; perturbed sphere: {exc}/50 exceptional, {low} margins <= τ (min {min_margin:.2e})",
            scan.verdict.as_str()
        ),
        t,
    );
}

#[test]
fn criterion_09_genericity_probe() {
    let t = Instant::now();
    let tol = Tolerances::default();
    let survey = random_jet_survey(3, 6, 100, 2024, 162, &tol).unwrap();
    let generic = survey.rows.iter().filter(|r| matches!(r.min_margin, Some(v) if v > tol.margin)).count();
    let low = random_jet_survey(3, 2, 100, 2024, 32, &tol).unwrap();
    let all_exceptional = low.failures() == 0 && low.fraction_exceptional(tol.margin) == 1.0;
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let archive = dir.join("jet_survey_m3_k6.csv");
    let mut csv = String::from("sample,min_margin,error\n");
    for r in &survey.rows {
        csv.push_str(&format!("{},{},{}\n", r.sample, r.min_margin.map(|v| v.to_string()).unwrap_or_default(), r.error.clone().unwrap_or_default()));
    }
    std::fs::write(&archive, csv).unwrap();
    let d = survey.distribution();
    let pass = generic >= 90 && all_exceptional && t.elapsed().as_secs_f64() < 600.0;
    report(
        9,
        pass,
        format!(
            "k=6: {generic}/100 samples with min margin > τ (min {:.2e}, median {:.2e}); k=2: all exceptional {all_exceptional}; distribution in {}",
            d.first().copied().unwrap_or(f64::NAN),
            d.get(d.len() / 2).copied().unwrap_or(f64::NAN),
            archive.display()
        ),
        t,
    );
}

#[test]
fn criterion_10_hull_iteration() {
    let t = Instant::now();
    let h = 0.02;
    let tri = vec![vec![-0.2, -0.1], vec![0.2, -0.15], vec![0.0, 0.2]];
    let opts = HullOptions { h, density: 2000, seed: 1 };
    let flat = hull_iterate(&metric("euclidean", CatalogParams::dim(2)), &tri, 3, &opts).unwrap();
    let small: Vec<Vec<f64>> = tri.iter().map(|p| p.iter().map(|c| 0.5 * c).collect()).collect();
    let sphere = hull_iterate(&metric("round-sphere", CatalogParams::dim(2)), &small, 3, &opts).unwrap();
    let (gf, gs) = (flat.gaps()[2], sphere.gaps()[2]);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for trial in 0..50 {
        let m = 2 + trial % 2;
        let n = rng.gen_range(m + 1..=m + 3);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.gen_range(-0.2..0.2)).collect()).collect();
        let hh = 0.03;
        let r = hull_iterate(&metric("euclidean", CatalogParams::dim(m)), &pts, m + 1, &HullOptions { h: hh, density: 2000, seed: trial as u64 }).unwrap();
        let (out, uncovered) = hull_agreement(&pts, &r.final_net(), 200, trial as u64);
        let d = out.max(uncovered) / hh;
        worst = worst.max(d);
        bad += (d > 2.0) as usize;
    }
    let pass = gf <= 2.0 * h && gs <= 2.0 * h && bad == 0 && t.elapsed().as_secs_f64() < 300.0;
    report(
        10,
        pass,
        format!("round-3 gaps: flat {:.2}h, sphere {:.2}h (bound 2h); 50 flat clouds: {bad} disagree, worst {worst:.2}h", gf / h, gs / h),
        t,
    );
}

#[test]
fn criterion_11_key_lemma_audits() {
    let t = Instant::now();
    let opts = AuditOptions::default();
    let audit = |name: &str, p: &[f64], len: f64| {
        let body = catalog_body(name, &BodyParams::dim(3)).unwrap();
        let path = find_boundary_geodesic(&body, p, len, 64).unwrap();
        key_lemma_audit(&body, &path, 5, &opts).unwrap()
    };
    let slab = audit("slab", &[0.1, 0.2, 0.0], 0.4);
    let hemi = audit("hemisphere-line", &[0.0, 0.0, 0.0], 0.5);
    let ok = |a: &convexlab::convex::KeyLemmaAudit| a.max_deviation() <= 1e-6 && a.max_condition_b() <= 1e-6;
    let hyper = catalog_body("hyperbolic-ball", &BodyParams::dim(3)).unwrap();
    let p = convexlab::convex::boundary_points(&hyper, 1, 0).unwrap().remove(0);
    let refused = matches!(find_boundary_geodesic(&hyper, &p, 0.1, 64), Err(convexlab::Error::NoBoundaryGeodesic(_)));
    let pass = ok(&slab) && ok(&hemi) && refused && t.elapsed().as_secs_f64() < 120.0;
    report(
        11,
        pass,
        format!(
            "slab deviation {:.1e} / (b) {:.1e}; hemisphere×line deviation {:.1e} / (b) {:.1e} (bound 1e-6); hyperbolic ball refused: {refused}",
            slab.max_deviation(),
            slab.max_condition_b(),
            hemi.max_deviation(),
            hemi.max_condition_b()
        ),
        t,
    );
}

const DETERMINISM_CONFIGS: [(&str, &str); 8] = [
    ("transport", "task = \"transport-convergence\"\n[metric]\nname = \"round-sphere\"\ndim = 3\n"),
    ("jets", "task = \"jet-check\"\nseed = 12\n[jet-check]\norder = 3\nsamples = 3\n"),
    ("scan", "task = \"exceptional-scan\"\n[metric]\nname = \"perturbed\"\ndim = 3\nseed = 4\n[exceptional-scan]\ngrid = 42\n"),
    ("geodesics", "task = \"geodesic-scan\"\nseed = 12\n[metric]\nname = \"perturbed\"\ndim = 3\nseed = 4\n[geodesic-scan]\nrandom = 3\n"),
    ("survey", "task = \"jet-survey\"\nseed = 12\n[jet-survey]\norder = 5\nsamples = 6\ngrid = 42\n"),
    ("hull", "task = \"hull-iterate\"\nseed = 12\n[metric]\nname = \"round-sphere\"\ndim = 2\n[hull-iterate]\npoints = [[0.0, 0.0], [0.2, 0.0], [0.0, 0.2]]\nrounds = 2\nh = 0.03\ndensity = 500\n"),
    ("key-lemma", "task = \"key-lemma-audit\"\n[body]\nname = \"slab\"\n[key-lemma-audit]\npoint = [0.1, 0.2, 0.0]\n"),
    ("strict", "task = \"strict-convexity-audit\"\nseed = 12\n[body]\nname = \"hemisphere-line\"\n[strict-convexity-audit]\nsamples = 3\n"),
];

#[test]
fn criterion_12_determinism() {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let mut differing = Vec::new();
    let mut files = 0;
    for (name, text) in DETERMINISM_CONFIGS {
        let cfg = dir.path().join(format!("{name}.toml"));
        std::fs::write(&cfg, text).unwrap();
        let outs: Vec<_> = ["0", "1"]
            .iter()
            .map(|threads| {
                let out = dir.path().join(format!("{name}-{threads}"));
                let mut cmd = Command::new(env!("CARGO_BIN_EXE_convexlab"));
                if *threads != "0" {
                    cmd.env("CONVEXLAB_THREADS", threads);
                }
                let status = cmd.arg("run").arg(&cfg).arg("-o").arg(&out).output().unwrap().status;
                assert!(status.code().unwrap() <= 1, "{name}: usage error");
                out
            })
            .collect();
        for entry in std::fs::read_dir(&outs[0]).unwrap() {
            let p = entry.unwrap().path();
            if p.extension().and_then(|e| e.to_str()) == Some("csv") {
                files += 1;
                if std::fs::read(&p).unwrap() != std::fs::read(outs[1].join(p.file_name().unwrap())).unwrap() {
                    differing.push(format!("{name}/{}", p.file_name().unwrap().to_string_lossy()));
                }
            }
        }
    }
    let pass = differing.is_empty() && files >= 8;
    report(12, pass, format!("8 tasks run twice (default pool, 1 thread): {files} CSV files, {} differ {differing:?}", differing.len()), t);
}
