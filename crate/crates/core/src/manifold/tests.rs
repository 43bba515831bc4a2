use super::*;
use crate::algebra::rat;
use crate::jets::{prescribe_jacobi, Q};

fn approx_mat(a: &Matrix<f64>, b: &Matrix<f64>, tol: f64) {
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }
}

fn space_form_operator(k: f64, x: &[f64]) -> Matrix<f64> {
    let m = x.len();
    let n2: f64 = x.iter().map(|v| v * v).sum();
    (0..m)
        .map(|a| (0..m).map(|b| k * (if a == b { n2 } else { 0.0 } - x[a] * x[b])).collect())
        .collect()
}

fn sphere(m: usize) -> MetricField {
    catalog_metric("round-sphere", &CatalogParams::dim(m)).unwrap()
}

#[test]
fn euclidean_is_identity_and_flat() {
    let e = catalog_metric("euclidean", &CatalogParams::dim(3)).unwrap();
    let p = [0.3, -1.0, 2.0];
    approx_mat(&e.eval(&p).unwrap(), &vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]], 0.0);
    assert!(christoffel(&e, &p).unwrap().iter().flatten().flatten().all(|v| *v == 0.0));
    let s = jacobi_operator_stack(&e, &p, &[1.0, 2.0, 0.5], 5).unwrap();
    assert!(s.operators.iter().flatten().flatten().all(|v| *v == 0.0));
}

#[test]
fn poincare_ball_at_origin() {
    let h = catalog_metric("hyperbolic-ball", &CatalogParams::dim(3)).unwrap();
    approx_mat(&h.eval(&[0.0; 3]).unwrap(), &vec![vec![4.0, 0.0, 0.0], vec![0.0, 4.0, 0.0], vec![0.0, 0.0, 4.0]], 0.0);
}

#[test]
fn normal_chart_sphere_matches_closed_form() {
    let params = CatalogParams { dim: 2, chart: Chart::Normal, ..Default::default() };
    let s = catalog_metric("round-sphere", &params).unwrap();
    let p = [0.9f64, -1.2];
    let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
    let f = (r.sin() / r).powi(2);
    let u = [p[0] / r, p[1] / r];
    let expected: Matrix<f64> = (0..2)
        .map(|a| (0..2).map(|b| u[a] * u[b] + f * (if a == b { 1.0 } else { 0.0 } - u[a] * u[b])).collect())
        .collect();
    approx_mat(&s.eval(&p).unwrap(), &expected, 1e-14);
    approx_mat(&s.eval(&[0.0, 0.0]).unwrap(), &vec![vec![1.0, 0.0], vec![0.0, 1.0]], 0.0);
}

#[test]
fn stereographic_christoffel_matches_conformal_formula() {
    let s = sphere(3);
    let p = [0.4, -0.7, 0.2];
    let n2: f64 = p.iter().map(|v| v * v).sum();
    let dphi: Vec<f64> = p.iter().map(|v| -2.0 * v / (1.0 + n2)).collect();
    let gam = christoffel(&s, &p).unwrap();
    for c in 0..3 {
        for a in 0..3 {
            for b in 0..3 {
                let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
                let expected = d(c, a) * dphi[b] + d(c, b) * dphi[a] - d(a, b) * dphi[c];
                assert!((gam[c][a][b] - expected).abs() < 1e-13);
            }
        }
    }
}

#[test]
fn constant_curvature_operators() {
    let x = [0.3, 1.1, -0.4];
    for (name, k) in [("round-sphere", 1.0), ("hyperbolic-ball", -1.0)] {
        let metric = catalog_metric(name, &CatalogParams::dim(3)).unwrap();
        let p = [0.1, -0.2, 0.15];
        let s = jacobi_operator_stack(&metric, &p, &x, 4).unwrap();
        approx_mat(s.operator(2), &space_form_operator(k, &s.x_hat), 1e-10);
        approx_mat(s.operator(3), &vec![vec![0.0; 3]; 3], 1e-10);
        approx_mat(s.operator(4), &vec![vec![0.0; 3]; 3], 1e-9);
        approx_mat(&curvature_operator(&metric, &p, &x).unwrap(), s.operator(2), 1e-12);
    }
}

#[test]
fn normal_chart_sphere_has_unit_curvature() {
    let params = CatalogParams { dim: 3, chart: Chart::Normal, ..Default::default() };
    let s = catalog_metric("round-sphere", &params).unwrap();
    let st = jacobi_operator_stack(&s, &[0.2, 0.1, -0.3], &[1.0, 0.0, 0.5], 5).unwrap();
    approx_mat(st.operator(2), &space_form_operator(1.0, &st.x_hat), 1e-9);
    for i in 3..=5 {
        approx_mat(st.operator(i), &vec![vec![0.0; 3]; 3], 1e-8);
    }
}

#[test]
fn line_factor_is_flat() {
    let m = catalog_metric("product-sphere-line", &CatalogParams::dim(3)).unwrap();
    let r = curvature_operator(&m, &[0.3, 0.2, 1.0], &[0.0, 0.0, 1.0]).unwrap();
    approx_mat(&r, &vec![vec![0.0; 3]; 3], 1e-14);
}

#[test]
fn revolution_product_curvature_at_axis() {
    let a = 0.1;
    let m = catalog_metric("revolution-product", &CatalogParams::dim(3)).unwrap();
    let r = curvature_operator(&m, &[0.0; 3], &[1.0, 0.0, 0.0]).unwrap();
    let expected = vec![vec![0.0; 3], vec![0.0, 6.0 * a, 0.0], vec![0.0; 3]];
    approx_mat(&r, &expected, 1e-12);
    // off axis: K = 6a / (1 − a r²) on the surface factor
    let p = [0.5, 0.7, 0.0];
    let r2 = 0.5f64 * 0.5 + 0.7 * 0.7;
    let st = jacobi_operator_stack(&m, &p, &[-0.7, 0.5, 0.0], 2).unwrap();
    let n2: f64 = st.x_hat.iter().map(|v| v * v).sum();
    let tr: f64 = (0..3).map(|i| st.operator(2)[i][i]).sum();
    assert!((tr / n2 - 6.0 * a / (1.0 - a * r2)).abs() < 1e-10);
}

#[test]
fn curvature_identities_on_perturbed_metric() {
    let params = CatalogParams { seed: 4, amplitude: 0.1, ..CatalogParams::dim(3) };
    let m = catalog_metric("perturbed", &params).unwrap();
    let res = CurvatureData::at(&m, &[0.2, -0.1, 0.3]).unwrap().residuals();
    assert!(res.antisymmetry < 1e-8 && res.bianchi < 1e-8 && res.pair_symmetry < 1e-8, "{res:?}");
}

#[test]
fn oversized_perturbation_is_rejected() {
    let params = CatalogParams { base: "euclidean".into(), amplitude: 10.0, ..CatalogParams::dim(3) };
    assert!(matches!(catalog_metric("perturbed", &params), Err(crate::Error::NotPositiveDefinite { .. })));
    assert!(matches!(catalog_metric("torus", &params), Err(crate::Error::UnknownMetric(_))));
}

#[test]
fn finite_differences_track_analytic_derivatives() {
    let params = CatalogParams { seed: 9, amplitude: 0.1, ..CatalogParams::dim(3) };
    let m = catalog_metric("perturbed", &params).unwrap();
    let fd = m.clone().with_finite_differences();
    let p = [0.1, 0.2, -0.1];
    let x = [0.6, -0.3, 0.8];
    let a = jacobi_operator_stack(&m, &p, &x, 3).unwrap();
    let b = jacobi_operator_stack(&fd, &p, &x, 3).unwrap();
    approx_mat(a.operator(2), b.operator(2), 1e-6);
    approx_mat(a.operator(3), b.operator(3), 1e-4);
}

#[test]
fn prescribed_jet_stack_is_exact_and_numerically_consistent() {
    let q = |n: i64| rat(n, 1);
    let z = || Q::from_integer(0.into());
    let a2 = vec![vec![z(), z(), z()], vec![z(), q(1), z()], vec![z(), z(), q(2)]];
    let a3 = vec![vec![z(), z(), z()], vec![z(), z(), q(1)], vec![z(), q(1), z()]];
    let x = vec![q(1), z(), z()];
    let jet = prescribe_jacobi(&x, &[a2.clone(), a3.clone()]).unwrap();
    let metric = MetricField::from_jet(&jet, 0.3).unwrap();
    let exact = stack::exact_stack(&metric, &x, 3).unwrap();
    assert_eq!(exact, vec![a2, a3]);
    let s = jacobi_operator_stack(&metric, &[0.0; 3], &[1.0, 0.0, 0.0], 3).unwrap();
    assert_eq!(s.mode, StackMode::Exact);
    let n = numerical_stack(&metric, &[0.0; 3], &[1.0, 0.0, 0.0], 3).unwrap();
    for i in 2..=3 {
        approx_mat(s.operator(i), n.operator(i), 1e-12);
    }
}

#[test]
fn zero_direction_and_low_order_are_errors() {
    let s = sphere(2);
    assert!(matches!(jacobi_operator_stack(&s, &[0.0, 0.0], &[0.0, 0.0], 3), Err(crate::Error::ZeroDirection)));
    assert!(matches!(jacobi_operator_stack(&s, &[0.0, 0.0], &[1.0, 0.0], 1), Err(crate::Error::InvalidOrder(1))));
    assert!(matches!(s.eval(&[100.0, 0.0]), Err(crate::Error::OutsideDomain(_))));
}

#[test]
fn fast_local_curvature_matches_series_connection() {
    let params = CatalogParams { seed: 2, amplitude: 0.1, ..CatalogParams::dim(3) };
    let m = catalog_metric("perturbed", &params).unwrap();
    let p = [0.15, -0.05, 0.2];
    let slow = CurvatureData::at(&m, &p).unwrap();
    let fast = local::LocalGeometry::at(&m, &p, true).unwrap();
    let r = fast.riemann.as_ref().unwrap();
    for d in 0..3 {
        for a in 0..3 {
            approx_mat(&fast.gamma[d], &slow.christoffel[d], 1e-13);
            for b in 0..3 {
                for c in 0..3 {
                    assert!((r[d][a][b][c] - slow.riemann[d][a][b][c]).abs() < 1e-11);
                }
            }
        }
    }
}
