use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use convexlab::jets::format::{parse, write, write_metric};
use convexlab::jets::{inverse_rho, normalize_jet, prescribe_jacobi, random_curvature_jet, random_metric_jet, rho, Q};
use convexlab::manifold::{numerical_stack, MetricField};
use convexlab::Tolerances;

fn q(n: i64) -> Q {
    Q::from_float(n as f64).unwrap()
}

fn to_f64(c: &Q) -> f64 {
    let s = c.to_string();
    match s.split_once('/') {
        Some((n, d)) => n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap(),
        None => s.parse().unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rho_and_its_inverse_round_trip(seed in any::<u64>(), m in 2..=3usize, k in 2..=4usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_curvature_jet(m, k, &mut rng, 4).unwrap();
        let g = inverse_rho(&r).unwrap();
        prop_assert!(g.is_normal());
        prop_assert_eq!(rho(&g).unwrap(), r);
        let h = normalize_jet(&random_metric_jet(m, k, &mut rng, 4)).unwrap();
        prop_assert_eq!(inverse_rho(&rho(&h).unwrap()).unwrap(), h);
    }

    #[test]
    fn normalizing_is_idempotent(seed in any::<u64>(), m in 2..=3usize, k in 2..=4usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_metric_jet(m, k, &mut rng, 4);
        let n = normalize_jet(&g).unwrap();
        prop_assert!(n.is_normal());
        prop_assert_eq!(normalize_jet(&n).unwrap(), n);
    }

    #[test]
    fn jet_files_round_trip_bit_exactly(seed in any::<u64>(), m in 2..=3usize, k in 1..=4usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_metric_jet(m, k, &mut rng, 9);
        let text = write_metric(&g);
        let back = parse(&text).unwrap();
        prop_assert_eq!(write(&back), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn prescribed_operators_are_recovered_numerically(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<Q> = loop {
            let x: Vec<Q> = (0..3).map(|_| q(rng.gen_range(-2..=2))).collect();
            if x.iter().any(|c| *c != q(0)) {
                break x;
            }
        };
        // symmetric operators killing x, built from two vectors spanning x⊥
        let cross = |a: &[Q], b: &[Q]| vec![&a[1] * &b[2] - &a[2] * &b[1], &a[2] * &b[0] - &a[0] * &b[2], &a[0] * &b[1] - &a[1] * &b[0]];
        let e = if x[0] == q(0) && x[1] == q(0) { vec![q(1), q(0), q(0)] } else { vec![q(0), q(0), q(1)] };
        let b1 = cross(&x, &e);
        let b2 = cross(&x, &b1);
        let ops: Vec<Vec<Vec<Q>>> = (0..3)
            .map(|_| {
                let c: Vec<Q> = (0..3).map(|_| q(rng.gen_range(-3..=3))).collect();
                (0..3)
                    .map(|u| (0..3).map(|v| &c[0] * &b1[u] * &b1[v] + &c[1] * &b2[u] * &b2[v] + &c[2] * (&b1[u] * &b2[v] + &b2[u] * &b1[v])).collect())
                    .collect()
            })
            .collect();
        let jet = prescribe_jacobi(&x, &ops).unwrap();
        let field = MetricField::from_jet(&jet, 0.02).unwrap();
        let xf: Vec<f64> = x.iter().map(to_f64).collect();
        let s = numerical_stack(&field, &[0.0; 3], &xf, 4).unwrap();
        let tol = Tolerances::default();
        for (i, a) in ops.iter().enumerate() {
            let af: Vec<f64> = a.iter().flatten().map(to_f64).collect();
            let scale = af.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
            let d: f64 = af.iter().zip(s.operator(i + 2).iter().flatten()).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
            prop_assert!(d <= tol.cross * scale, "degree {}: {:e}", i + 2, d);
        }
    }
}
