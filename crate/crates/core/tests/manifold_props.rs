use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use convexlab::jets::{inverse_rho, random_curvature_jet};
use convexlab::manifold::metric::min_eigenvalue;
use convexlab::manifold::{catalog_metric, jacobi_operator_stack, numerical_stack, CatalogParams, CurvatureData, Matrix, MetricField, StackMode};
use convexlab::Tolerances;

const MODELS: [&str; 5] = ["euclidean", "round-sphere", "hyperbolic-ball", "product-sphere-line", "revolution-product"];

fn model(i: usize, seed: u64) -> MetricField {
    if i == MODELS.len() {
        return catalog_metric("perturbed", &CatalogParams { seed, ..CatalogParams::dim(3) }).unwrap();
    }
    catalog_metric(MODELS[i], &CatalogParams::dim(3)).unwrap()
}

fn inside(metric: &MetricField, u: &[f64]) -> Vec<f64> {
    let e = metric.domain().edge();
    metric.domain().center().iter().zip(u).map(|(c, t)| c + 0.25 * e * t).collect()
}

fn frob(a: &Matrix<f64>) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

fn unit_cube() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 3)
}

fn direction() -> impl Strategy<Value = Vec<f64>> {
    unit_cube().prop_filter("nonzero", |x| x.iter().map(|v| v * v).sum::<f64>() > 1e-2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn metric_is_positive_definite(i in 0..6usize, seed in 0..20u64, u in unit_cube()) {
        let m = model(i, seed);
        let g = m.eval(&inside(&m, &u)).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                prop_assert_eq!(g[r][c], g[c][r]);
            }
        }
        prop_assert!(min_eigenvalue(&g) > 0.0);
    }

    #[test]
    fn jacobi_operators_are_symmetric_homogeneous_and_kill_x(i in 0..6usize, seed in 0..20u64, u in unit_cube(), x in direction()) {
        let tol = Tolerances::default();
        let m = model(i, seed);
        let p = inside(&m, &u);
        let s = jacobi_operator_stack(&m, &p, &x, 5).unwrap();
        let xn = s.x_hat.iter().map(|v| v * v).sum::<f64>().sqrt();
        // identically vanishing operators are roundoff-sized; compare against the stack
        let scale = s.operators.iter().map(frob).fold(0.0, f64::max);
        for lambda in [-1.0, 0.5, 2.0] {
            let xl: Vec<f64> = x.iter().map(|v| lambda * v).collect();
            let sl = jacobi_operator_stack(&m, &p, &xl, 5).unwrap();
            for i in 2..=5 {
                let (a, b) = (s.operator(i), sl.operator(i));
                let li = f64::powi(lambda, i as i32);
                let d: f64 = a.iter().flatten().zip(b.iter().flatten()).map(|(u, v)| (v - li * u).powi(2)).sum::<f64>().sqrt();
                prop_assert!(d <= tol.hom * li.abs() * frob(a).max(scale) + 1e-300);
            }
        }
        for i in 2..=5 {
            let a = s.operator(i);
            for r in 0..3 {
                for c in 0..3 {
                    prop_assert!((a[r][c] - a[c][r]).abs() <= tol.sym);
                }
            }
            let ax = a.iter().map(|row| row.iter().zip(&s.x_hat).map(|(u, v)| u * v).sum::<f64>().powi(2)).sum::<f64>().sqrt();
            prop_assert!(ax <= tol.sym * frob(a).max(scale) * xn + 1e-300, "i={} |Ax|={:e}", i, ax);
        }
    }

    #[test]
    fn curvature_identities_hold(i in 0..6usize, seed in 0..20u64, u in unit_cube()) {
        let tol = Tolerances::default();
        let m = model(i, seed);
        let r = CurvatureData::at(&m, &inside(&m, &u)).unwrap().residuals();
        prop_assert!(r.antisymmetry <= tol.curv, "{:?}", r);
        prop_assert!(r.bianchi <= tol.curv, "{:?}", r);
        prop_assert!(r.pair_symmetry <= tol.curv, "{:?}", r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exact_and_numerical_stacks_agree(seed in 0..1000u64, k in 2..=4usize, x in direction()) {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_curvature_jet(3, k, &mut rng, 2).unwrap();
        let field = MetricField::from_jet(&inverse_rho(&r).unwrap(), 0.02).unwrap();
        let exact = jacobi_operator_stack(&field, &[0.0; 3], &x, k).unwrap();
        prop_assert_eq!(exact.mode, StackMode::Exact);
        let num = numerical_stack(&field, &[0.0; 3], &x, k).unwrap();
        let scale = exact.operators.iter().map(frob).fold(1e-300, f64::max);
        for (a, b) in exact.operators.iter().zip(&num.operators) {
            let d: f64 = a.iter().flatten().zip(b.iter().flatten()).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
            prop_assert!(d <= tol.cross * scale, "{:e} vs {:e}", d, scale);
        }
    }
}
