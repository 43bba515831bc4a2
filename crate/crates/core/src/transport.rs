//! Iterated-Jacobi-field transport and the pinched Jacobi field expansion.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geodesic::jacobi::jacobi_bvp_sampled;
use crate::geodesic::{shoot_geodesic, GeodesicPath};
use crate::manifold::local::LocalGeometry;
use crate::manifold::MetricField;
use crate::Tolerances;

/// `v_k` from `v_{i+1} = 2·J_i(t_{i+1})`, where `J_i` is the Jacobi field with
/// `J_i(t_i) = v_i`, `J_i(t_{i+2}) = 0` on the progression `t_i = a + i(b−a)/k`.
/// The path must extend to `t_{k+1}`.
pub fn iterated_transport(path: &GeodesicPath, a: f64, b: f64, v0: &[f64], k: usize) -> Result<Vec<f64>> {
    if k < 2 {
        return Err(Error::InvalidParameter("iterated transport needs k ≥ 2".into()));
    }
    if !(a < b) {
        return Err(Error::InvalidParameter("iterated transport needs a < b".into()));
    }
    let h = (b - a) / k as f64;
    let last = a + (k + 1) as f64 * h;
    if last > path.end_time() + 1e-12 * (1.0 + last.abs()) || path.truncated && last > path.end_time() {
        return Err(Error::Truncated(path.end_time()));
    }
    let conj = Tolerances::default().conj;
    let zero = vec![0.0; v0.len()];
    let mut v = v0.to_vec();
    for i in 0..k {
        let ti = a + i as f64 * h;
        let tend = if i + 2 == k + 1 { last.min(path.end_time()) } else { a + (i + 2) as f64 * h };
        let field = jacobi_bvp_sampled(path, ti, tend, &v, &zero, 2, conj)?;
        v = field.values[1].iter().map(|c| 2.0 * c).collect();
    }
    Ok(v)
}

/// Pinched field `J_ε` with `J_ε(a ± ε) = v`, and its quadratic coefficient
/// `2(J_ε(a) − v)/ε²`.
#[derive(Clone, Debug, PartialEq)]
pub struct PinchedExpansion {
    pub value: Vec<f64>,
    pub quadratic: Vec<f64>,
}

/// The Jacobi field equal at `a ± ε` to the parallel translates of `v`.
/// The component of `v` along `γ'` carries an affine Jacobi field, constant
/// when pinched; only the normal part is solved for.
pub fn pinched_jacobi_expansion(path: &GeodesicPath, a: f64, v: &[f64], eps: f64) -> Result<PinchedExpansion> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("pinch width must be positive".into()));
    }
    let metric = path.metric();
    let (x, vel) = path.state_at(a)?;
    let vv = metric.inner(&x, &vel, &vel);
    let alpha = if vv > 0.0 { metric.inner(&x, v, &vel) / vv } else { 0.0 };
    let normal: Vec<f64> = v.iter().zip(&vel).map(|(vi, gi)| vi - alpha * gi).collect();
    if normal.iter().all(|c| *c == 0.0) {
        return Ok(PinchedExpansion { value: v.to_vec(), quadratic: vec![0.0; v.len()] });
    }
    let (_, _, back) = path.transport(a, a - eps, &[normal.clone()])?;
    let (_, _, ahead) = path.transport(a, a + eps, &[normal.clone()])?;
    let field = jacobi_bvp_sampled(path, a - eps, a + eps, &back[0], &ahead[0], 2, Tolerances::default().conj)?;
    let mid = &field.values[1];
    let quadratic: Vec<f64> = mid.iter().zip(&normal).map(|(j, n)| 2.0 * (j - n) / (eps * eps)).collect();
    let value = mid.iter().zip(v).zip(&normal).map(|((j, vi), n)| j + vi - n).collect();
    Ok(PinchedExpansion { value, quadratic })
}

/// Richardson extrapolation `(4 q(ε/2) − q(ε)) / 3` of the quadratic
/// coefficient.
pub fn pinched_quadratic_richardson(path: &GeodesicPath, a: f64, v: &[f64], eps: f64) -> Result<Vec<f64>> {
    let q1 = pinched_jacobi_expansion(path, a, v, eps)?.quadratic;
    let q2 = pinched_jacobi_expansion(path, a, v, 0.5 * eps)?.quadratic;
    Ok(q1.iter().zip(&q2).map(|(a, b)| (4.0 * b - a) / 3.0).collect())
}

/// `R²_{γ'(a)} v = Rm(v, γ')γ'` in chart coordinates.
pub fn jacobi_operator_along(path: &GeodesicPath, a: f64, v: &[f64]) -> Result<Vec<f64>> {
    let (x, vel) = path.state_at(a)?;
    let geo = LocalGeometry::at(path.metric(), &x, true)?;
    Ok(geo.rm(v, &vel, &vel))
}

/// One geodesic of a convergence study: `γ(0) = point`, `γ'(0) = velocity`,
/// transported over `[0, length]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransportCase {
    pub point: Vec<f64>,
    pub velocity: Vec<f64>,
    pub length: f64,
    pub vectors: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportRow {
    pub k: usize,
    /// `|ι_k v − Π v|_g / |v|_g`, or the failure message
    pub error: std::result::Result<f64, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportReport {
    pub metric: String,
    pub case: usize,
    pub vector: usize,
    pub reference: Vec<f64>,
    pub rows: Vec<TransportRow>,
    /// errors strictly decrease along the table
    pub decreasing: bool,
}

impl TransportReport {
    pub fn error(&self, k: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.k == k).and_then(|r| r.error.clone().ok())
    }
}

/// Runs every `(case, vector, k)` and compares with reference transport.
pub fn transport_convergence_report(metric: &Arc<MetricField>, cases: &[TransportCase], ks: &[usize]) -> Vec<TransportReport> {
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let kmin = ks.first().copied().unwrap_or(2).max(1);
    let jobs: Vec<(usize, usize)> = cases
        .iter()
        .enumerate()
        .flat_map(|(c, case)| (0..case.vectors.len()).map(move |v| (c, v)))
        .collect();
    crate::exec::map(&jobs, |&(ci, vi)| {
        let case = &cases[ci];
        let v0 = &case.vectors[vi];
        let fail = |msg: String| TransportReport {
            metric: metric.name().to_string(),
            case: ci,
            vector: vi,
            reference: vec![],
            rows: ks.iter().map(|&k| TransportRow { k, error: Err(msg.clone()) }).collect(),
            decreasing: false,
        };
        let extend = case.length * (1.0 + 1.0 / kmin as f64);
        let n = 64.max(2 * ks.last().copied().unwrap_or(8));
        let path = match shoot_geodesic(metric, &case.point, &case.velocity, extend, n) {
            Ok(p) => p,
            Err(e) => return fail(e.to_string()),
        };
        let reference = match path.transport(0.0, case.length, &[v0.clone()]) {
            Ok((x, _, w)) => (x, w.into_iter().next().expect("one vector")),
            Err(e) => return fail(e.to_string()),
        };
        let norm0 = metric.norm(&case.point, v0).max(1e-300);
        let rows: Vec<TransportRow> = ks
            .iter()
            .map(|&k| {
                let error = iterated_transport(&path, 0.0, case.length, v0, k)
                    .map(|w| {
                        let d: Vec<f64> = w.iter().zip(&reference.1).map(|(a, b)| a - b).collect();
                        metric.norm(&reference.0, &d) / norm0
                    })
                    .map_err(|e| e.to_string());
                TransportRow { k, error }
            })
            .collect();
        let errs: Vec<Option<f64>> = rows.iter().map(|r| r.error.clone().ok()).collect();
        let decreasing = errs.iter().all(|e| e.is_some())
            && errs.windows(2).all(|w| w[1].expect("checked") < w[0].expect("checked"));
        TransportReport { metric: metric.name().to_string(), case: ci, vector: vi, reference: reference.1, rows, decreasing }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{catalog_metric, CatalogParams};

    fn sphere() -> Arc<MetricField> {
        Arc::new(catalog_metric("round-sphere", &CatalogParams::dim(3)).unwrap())
    }

    fn equator_case() -> TransportCase {
        TransportCase { point: vec![1.0, 0.0, 0.0], velocity: vec![0.0, 1.0, 0.0], length: 1.0, vectors: vec![vec![0.0, 0.0, 1.0]] }
    }

    #[test]
    fn flat_iterated_transport_is_exact() {
        let e = Arc::new(catalog_metric("euclidean", &CatalogParams::dim(3)).unwrap());
        let case = TransportCase {
            point: vec![0.1, 0.2, 0.3],
            velocity: vec![0.5, -0.2, 0.1],
            length: 1.0,
            vectors: vec![vec![0.3, 1.0, -2.0]],
        };
        for r in transport_convergence_report(&e, &[case], &[2, 3, 8, 17]) {
            for row in &r.rows {
                assert!(row.error.clone().unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn sphere_error_follows_secant_oracle() {
        // normal part: J_i(t_{i+1}) = v_i / (2 cos h), so ι_k v = sec^k(1/k) · Π v
        let reports = transport_convergence_report(&sphere(), &[equator_case()], &[8, 16, 32, 64]);
        let r = &reports[0];
        for k in [8usize, 16, 32, 64] {
            let oracle = (1.0 / (1.0 / k as f64).cos()).powi(k as i32) - 1.0;
            assert!((r.error(k).unwrap() - oracle).abs() < 1e-8, "k={k}");
        }
        assert!(r.decreasing);
        assert!(r.error(64).unwrap() <= r.error(8).unwrap() / 4.0);
    }

    #[test]
    fn pinched_coefficient_on_sphere() {
        let s = sphere();
        let path = shoot_geodesic(&s, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 1.0, 16).unwrap();
        let v = [0.0, 0.0, 1.0];
        let q = pinched_quadratic_richardson(&path, 0.5, &v, 1e-2).unwrap();
        let (x, _) = path.state_at(0.5).unwrap();
        let r = jacobi_operator_along(&path, 0.5, &v).unwrap();
        let d: Vec<f64> = q.iter().zip(&r).map(|(a, b)| a - b).collect();
        assert!(s.norm(&x, &d) <= 1e-3 * s.norm(&x, &r));
        // R² v = v for unit-speed γ' and v ⊥ γ'
        assert!((s.norm(&x, &r) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pinched_coefficient_off_the_equator() {
        let s = sphere();
        let path = shoot_geodesic(&s, &[0.05, -0.03, 0.02], &[0.3, 0.2, -0.1], 1.0, 16).unwrap();
        let v = [0.1, -0.4, 0.7];
        let (x, vel) = path.state_at(0.5).unwrap();
        let (vv, vg) = (s.inner(&x, &vel, &vel), s.inner(&x, &v, &vel));
        let exact: Vec<f64> = v.iter().zip(&vel).map(|(a, b)| vv * a - vg * b).collect();
        let q = pinched_quadratic_richardson(&path, 0.5, &v, 1e-2).unwrap();
        let d: Vec<f64> = q.iter().zip(&exact).map(|(a, b)| a - b).collect();
        assert!(s.norm(&x, &d) <= 1e-6 * s.norm(&x, &exact));
    }

    #[test]
    fn pinched_coefficient_vanishes_along_velocity() {
        let s = sphere();
        let path = shoot_geodesic(&s, &[0.3, 0.2, -0.4], &[0.2, 0.5, 0.1], 1.0, 16).unwrap();
        let (_, vel) = path.state_at(0.4).unwrap();
        let e = pinched_jacobi_expansion(&path, 0.4, &vel, 1e-2).unwrap();
        assert!(e.quadratic.iter().all(|c| *c == 0.0));
        assert_eq!(e.value, vel);
    }

    #[test]
    fn short_paths_are_rejected() {
        let s = sphere();
        let path = shoot_geodesic(&s, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 1.0, 16).unwrap();
        assert!(matches!(iterated_transport(&path, 0.0, 1.0, &[0.0, 0.0, 1.0], 8), Err(Error::Truncated(_))));
    }
}
