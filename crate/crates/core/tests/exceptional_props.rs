use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use convexlab::exceptional::brute::random_family;
use convexlab::exceptional::{analyze_family, invariance_residual, random_jet_survey, Verdict};
use convexlab::exec;
use convexlab::Tolerances;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn witnesses_are_sound(seed in any::<u64>(), m in 3..=4usize, count in 1..=3usize, reducible in any::<bool>()) {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (ops, x) = random_family(&mut rng, m, count, reducible);
        let r = analyze_family(&ops, &x, &tol).unwrap();
        if r.verdict != Verdict::Exceptional {
            return Ok(());
        }
        let w = r.witness.expect("exceptional verdicts carry a witness");
        prop_assert!(w.len() > 1 && w.len() < m);
        let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (a, b) in w[0].iter().zip(&x) {
            prop_assert!((a - b / xn).abs() <= 1e-10);
        }
        let v = DMatrix::from_fn(m, w.len(), |i, j| w[j][i]);
        prop_assert!(invariance_residual(&ops, &v) <= tol.inv);
    }

    #[test]
    fn verdicts_are_scale_invariant(seed in any::<u64>(), m in 3..=4usize, count in 1..=3usize, reducible in any::<bool>(),
                                    lambda in prop::sample::select(vec![-3.0, -0.5, 0.25, 7.0]), c in prop::sample::select(vec![-2.0, 0.1, 5.0])) {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (ops, x) = random_family(&mut rng, m, count, reducible);
        let base = analyze_family(&ops, &x, &tol).unwrap().verdict;
        let scaled_ops: Vec<_> = ops.iter().map(|a| a.iter().map(|row| row.iter().map(|v| c * v).collect()).collect()).collect();
        let scaled_x: Vec<f64> = x.iter().map(|v| lambda * v).collect();
        prop_assert_eq!(analyze_family(&scaled_ops, &scaled_x, &tol).unwrap().verdict, base);
    }
}

#[test]
fn surveys_are_deterministic() {
    let tol = Tolerances::default();
    let a = random_jet_survey(3, 4, 6, 77, 32, &tol).unwrap();
    let b = random_jet_survey(3, 4, 6, 77, 32, &tol).unwrap();
    exec::set_sequential(true);
    let c = random_jet_survey(3, 4, 6, 77, 32, &tol).unwrap();
    exec::set_sequential(false);
    assert_eq!(a, b);
    assert_eq!(a, c);
    let d = random_jet_survey(3, 4, 6, 78, 32, &tol).unwrap();
    assert_ne!(a, d);
}
