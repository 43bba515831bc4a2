use super::*;
use crate::algebra::rat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> Q {
    rat(n, d)
}

fn x(i: usize) -> Poly<Q> {
    Poly::var(i)
}

/// `G²_x = c(|x|² I − x xᵀ)` in dimension `m`.
fn space_form_g2(m: usize, c: Q) -> SymPolyMatrix {
    let r2 = (0..m).fold(Poly::zero(), |acc: Poly<Q>, i| acc.add(&x(i).mul(&x(i))));
    let mut s = zero_matrix(m);
    for a in 0..m {
        for b in 0..m {
            let mut p = x(a).mul(&x(b)).neg();
            if a == b {
                p.add_assign(&r2);
            }
            s[a][b] = p.scale(&c);
        }
    }
    s
}

#[test]
fn sphere_jacobi_operator_is_projection() {
    // normal coordinates of the unit sphere: G² = −⅓(|x|² I − x xᵀ)
    let jet = single_component_jet(2, 2, space_form_g2(2, q(-1, 3)));
    assert!(jet.is_normal());
    let r = rho(&jet).unwrap();
    assert_eq!(r.component(2), &space_form_g2(2, Q::one()));
}

#[test]
fn second_order_coefficient_is_minus_one_third() {
    for m in 2..=3 {
        assert_eq!(top_degree_coefficient(m, 2).unwrap(), q(-1, 3));
    }
}

#[test]
fn top_degree_coefficients_match_closed_form() {
    // G^i = c_i R^i on single-component normal jets
    for i in 2..=5usize {
        let fact: i64 = (1..=(i as i64 + 1)).product();
        let expected = q(-2 * (i as i64 - 1), fact);
        assert_eq!(top_degree_coefficient(2, i).unwrap(), expected, "degree {i}");
    }
}

#[test]
fn conformal_curvature_matches_gauss_formula() {
    // g = (1 + h) I with h = a x + b y + p x² + r x y + s y²;
    // K(0) = −½(Δ(quadratic part) − |∇(linear part)|²)
    let (a, b, p, r, s) = (q(1, 2), q(-1, 3), q(2, 5), q(1, 7), q(-3, 4));
    let h1 = Poly::linear(&[a.clone(), b.clone()]);
    let h2 = x(0).mul(&x(0)).scale(&p).add(&x(0).mul(&x(1)).scale(&r)).add(&x(1).mul(&x(1)).scale(&s));
    let diag = |h: &Poly<Q>| vec![vec![h.clone(), Poly::zero()], vec![Poly::zero(), h.clone()]];
    let jet = MetricJet::new(2, vec![diag(&h1), diag(&h2)]).unwrap();
    let lap = (&p + &s) * q(2, 1);
    let grad2 = &a * &a + &b * &b;
    let k = -(lap - grad2) / q(2, 1);
    let rj = rho(&jet).unwrap();
    assert_eq!(rj.component(2), &space_form_g2(2, k));
}

#[test]
fn inverse_rho_recovers_normal_jets() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (m, k) in [(2, 4), (3, 3)] {
        let r = random_curvature_jet(m, k, &mut rng, 3).unwrap();
        let g = inverse_rho(&r).unwrap();
        assert!(g.is_normal());
        assert_eq!(rho(&g).unwrap(), r);
    }
}

#[test]
fn normalization_preserves_curvature_jet() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = random_metric_jet(2, 3, &mut rng, 2);
    assert!(!g.is_normal());
    let n = normalize_jet(&g).unwrap();
    assert!(n.is_normal());
    assert_eq!(rho(&n).unwrap(), rho(&g).unwrap());
}

#[test]
fn non_normal_jet_reports_witness() {
    let mut s = zero_matrix(2);
    s[0][0] = x(0);
    let jet = MetricJet::new(2, vec![s]).unwrap();
    let v = jet.check_normal().unwrap_err();
    assert_eq!(v.degree, 1);
    assert_eq!(v.component, 0);
}

#[test]
fn prescribed_operators_are_realized() {
    let xdir = vec![q(1, 1), q(2, 1), q(-1, 1)];
    // symmetric operators annihilating x
    let basis = complement_basis(&xdir);
    let mk = |c: [i64; 3]| {
        let mut a = vec![vec![Q::zero(); 3]; 3];
        let coeffs = [(0, 0, c[0]), (1, 1, c[1]), (0, 1, c[2])];
        for (i, j, cc) in coeffs {
            for u in 0..3 {
                for v in 0..3 {
                    let mut t = &basis[i][u] * &basis[j][v];
                    if i != j {
                        t += &basis[j][u] * &basis[i][v];
                    }
                    a[u][v] += t * q(cc, 1);
                }
            }
        }
        a
    };
    let ops = vec![mk([1, -2, 3]), mk([0, 5, -1]), mk([2, 2, 0])];
    let g = prescribe_jacobi(&xdir, &ops).unwrap();
    assert!(g.is_normal());
    let r = rho(&g).unwrap();
    for (i, a) in ops.iter().enumerate() {
        assert_eq!(&r.operator_at(i + 2, &xdir), a, "degree {}", i + 2);
    }
}

#[test]
fn prescribe_rejects_operator_not_killing_direction() {
    let xdir = vec![q(1, 1), q(0, 1)];
    let a = vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(0, 1)]];
    assert!(matches!(prescribe_jacobi(&xdir, &[a]), Err(Error::InadmissibleOperator(_))));
}

#[test]
fn admissible_dimensions() {
    // dim N^i = dim Sym-valued degree i − dim vector-valued degree i+1 (surjective)
    for m in 2..=3 {
        for i in 1..=4 {
            let vec_dim = m * monomials_of_degree(m, i + 1).len();
            assert_eq!(admissible_basis(m, i).len(), sym_poly_dim(m, i) - vec_dim, "m={m} i={i}");
        }
    }
}

#[test]
fn differential_rank_is_full_at_flat_and_random_bases() {
    let rep = rho_differential_rank(&MetricJet::zero(2, 3), 3).unwrap();
    assert!(rep.is_submersion());
    assert_eq!(rep.normal_restriction_bijective(), Some(true));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = random_metric_jet(2, 3, &mut rng, 2);
    assert!(rho_differential_rank(&g, 3).unwrap().is_submersion());
}

#[test]
fn jet_files_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = random_metric_jet(3, 2, &mut rng, 4);
    let text = format::write_metric(&g);
    let back = format::parse(&text).unwrap();
    assert_eq!(back, format::JetFile::Metric(g));
    assert_eq!(format::write(&back), text);
    let r = random_curvature_jet(2, 4, &mut rng, 3).unwrap();
    let text = format::write_curvature(&r);
    assert_eq!(format::parse(&text).unwrap(), format::JetFile::Curvature(r));
}

#[test]
fn parse_reports_line_numbers() {
    let bad = "convexlab-jet 1\nkind metric\ndim 2\norder 1\nc 1 1 0 1 0 1/2\n";
    assert!(matches!(format::parse(bad), Err(Error::Parse { line: 5, .. })));
}
