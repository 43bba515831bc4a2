//! Jacobi operators of all orders from a polynomial (or truncated Taylor)
//! metric, by expanding the parallel-transported curvature operator along the
//! geodesic in powers of time.
//!
//! Everything is graded: with initial velocity `v` given by degree-one
//! polynomials, the coefficient of `t^n` in the geodesic is homogeneous of
//! degree `n` in the velocity variables, so time never appears explicitly and
//! all series are plain polynomials truncated at a total degree.

use std::collections::BTreeMap;

use crate::algebra::elim;
use crate::algebra::poly::{Mono, Poly, MAX_VARS};
use crate::algebra::Coeff;

pub type PolyMatrix<C> = Vec<Vec<Poly<C>>>;

/// Christoffel symbols and curvature of a polynomial metric, as polynomials
/// in the chart coordinates.
#[derive(Clone, Debug)]
pub struct Connection<C> {
    pub dim: usize,
    /// `christoffel[c][a][b] = Γ^c_{ab}`
    pub christoffel: Vec<Vec<Vec<Poly<C>>>>,
    /// `riemann[d][a][b][c] = R^d_{abc}` with `Rm(∂_a,∂_b)∂_c = R^d_{abc} ∂_d`
    pub riemann: Vec<Vec<Vec<Vec<Poly<C>>>>>,
}

pub fn identity<C: Coeff>(m: usize) -> PolyMatrix<C> {
    (0..m)
        .map(|i| (0..m).map(|j| if i == j { Poly::one() } else { Poly::zero() }).collect())
        .collect()
}

pub fn mat_mul<C: Coeff>(a: &PolyMatrix<C>, b: &PolyMatrix<C>, max_deg: usize) -> PolyMatrix<C> {
    let n = a.len();
    let p = b[0].len();
    let inner = b.len();
    let mut out = vec![vec![Poly::zero(); p]; n];
    for i in 0..n {
        for j in 0..p {
            let mut acc = Poly::zero();
            for k in 0..inner {
                if !a[i][k].is_zero() && !b[k][j].is_zero() {
                    a[i][k].mul_acc(&b[k][j], max_deg, &mut acc);
                }
            }
            out[i][j] = acc;
        }
    }
    out
}

fn mat_add<C: Coeff>(a: &PolyMatrix<C>, b: &PolyMatrix<C>) -> PolyMatrix<C> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.add(y)).collect())
        .collect()
}

fn mat_map<C: Coeff>(a: &PolyMatrix<C>, f: impl Fn(&Poly<C>) -> Poly<C>) -> PolyMatrix<C> {
    a.iter().map(|r| r.iter().map(&f).collect()).collect()
}

/// Power-series inverse of a matrix polynomial whose constant part is
/// invertible, truncated at `max_deg`.
pub fn series_inverse<C: Coeff>(a: &PolyMatrix<C>, max_deg: usize) -> PolyMatrix<C> {
    let m = a.len();
    let a0: Vec<Vec<C>> = a.iter().map(|r| r.iter().map(|p| p.constant_term()).collect()).collect();
    let a0inv = elim::inverse(&a0).expect("constant part of metric is singular");
    let a0inv_p: PolyMatrix<C> = a0inv
        .iter()
        .map(|r| r.iter().map(|c| Poly::constant(c.clone())).collect())
        .collect();
    // a = a0 (I + a0^{-1} h) with h the nonconstant part
    let h: PolyMatrix<C> = a
        .iter()
        .enumerate()
        .map(|(i, r)| r.iter().enumerate().map(|(j, p)| p.sub(&Poly::constant(a0[i][j].clone()))).collect())
        .collect();
    let q = mat_map(&mat_mul(&a0inv_p, &h, max_deg), |p| p.neg());
    let mut acc = identity::<C>(m);
    let mut pow = identity::<C>(m);
    for _ in 0..max_deg {
        pow = mat_mul(&pow, &q, max_deg);
        if pow.iter().all(|r| r.iter().all(|p| p.is_zero())) {
            break;
        }
        acc = mat_add(&acc, &pow);
    }
    mat_mul(&acc, &a0inv_p, max_deg)
}

/// Levi-Civita connection and curvature of `g`, accurate through
/// `christoffel_deg` for Γ and `christoffel_deg - 1` for the curvature.
pub fn connection<C: Coeff>(g: &PolyMatrix<C>, christoffel_deg: usize) -> Connection<C> {
    let m = g.len();
    let ginv = series_inverse(g, christoffel_deg);
    let dg: Vec<Vec<Vec<Poly<C>>>> = (0..m)
        .map(|a| (0..m).map(|b| (0..m).map(|c| g[b][c].derivative(a)).collect()).collect())
        .collect();
    let half = C::from_ratio(1, 2);
    let mut christoffel = vec![vec![vec![Poly::zero(); m]; m]; m];
    for c in 0..m {
        for a in 0..m {
            for b in a..m {
                let mut acc = Poly::zero();
                for d in 0..m {
                    let s = dg[a][d][b].add(&dg[b][d][a]).sub(&dg[d][a][b]);
                    if !s.is_zero() && !ginv[c][d].is_zero() {
                        ginv[c][d].mul_acc(&s, christoffel_deg, &mut acc);
                    }
                }
                let v = acc.scale(&half);
                christoffel[c][b][a] = v.clone();
                christoffel[c][a][b] = v;
            }
        }
    }
    let rdeg = christoffel_deg.saturating_sub(1);
    let mut riemann = vec![vec![vec![vec![Poly::zero(); m]; m]; m]; m];
    for d in 0..m {
        for a in 0..m {
            for b in (a + 1)..m {
                for c in 0..m {
                    let mut acc = christoffel[d][b][c].derivative(a).sub(&christoffel[d][a][c].derivative(b));
                    for e in 0..m {
                        christoffel[e][b][c].mul_acc(&christoffel[d][a][e], rdeg, &mut acc);
                        christoffel[e][a][c]
                            .neg()
                            .mul_acc(&christoffel[d][b][e], rdeg, &mut acc);
                    }
                    let acc = acc.truncate(rdeg);
                    riemann[d][b][a][c] = acc.neg();
                    riemann[d][a][b][c] = acc;
                }
            }
        }
    }
    Connection { dim: m, christoffel, riemann }
}

/// Substitutes `vals` into many polynomials sharing one power cache.
struct Composer<'a, C: Coeff> {
    vals: &'a [Poly<C>],
    max_deg: usize,
    cache: BTreeMap<Mono, Poly<C>>,
}

impl<'a, C: Coeff> Composer<'a, C> {
    fn new(vals: &'a [Poly<C>], max_deg: usize) -> Self {
        let mut cache = BTreeMap::new();
        cache.insert([0; MAX_VARS], Poly::one());
        Composer { vals, max_deg, cache }
    }

    fn power(&mut self, m: &Mono) -> Poly<C> {
        if let Some(p) = self.cache.get(m) {
            return p.clone();
        }
        let i = (0..MAX_VARS).rev().find(|&i| m[i] > 0).expect("nonconstant monomial");
        let mut rest = *m;
        rest[i] -= 1;
        let base = self.power(&rest);
        let p = base.mul_trunc(&self.vals[i], self.max_deg);
        self.cache.insert(*m, p.clone());
        p
    }

    fn compose(&mut self, p: &Poly<C>) -> Poly<C> {
        let mut out = Poly::zero();
        for (m, c) in p.terms() {
            let pw = self.power(m);
            out.add_assign(&pw.scale(c));
        }
        out
    }
}

/// Output of [`transported_jacobi_series`]: `operators[i - 2]` is the
/// coordinate matrix of `R^i` (row = output component), homogeneous of degree
/// `i` in the velocity variables.
#[derive(Clone, Debug)]
pub struct JacobiSeries<C> {
    pub operators: Vec<PolyMatrix<C>>,
}

/// Computes `R^2, …, R^order` along the geodesic with initial velocity `dir`
/// (degree-one polynomials) for the metric polynomial `g` centred at the
/// base point.
///
/// `R^i = (i-2)! · [t^{i-2}] P(t)^{-1} Rm(·, γ')γ' P(t)` where `P` is the
/// parallel frame. When `radial` is set the caller guarantees that the chart
/// is normal at the origin (so geodesics from the base are straight lines).
pub fn transported_jacobi_series<C: Coeff>(
    g: &PolyMatrix<C>,
    dir: &[Poly<C>],
    order: usize,
    radial: bool,
) -> JacobiSeries<C> {
    assert!(order >= 2);
    let m = g.len();
    let top = order;
    let conn = connection(g, top - 1);

    // geodesic position Y, graded: degree n <-> t^n
    let mut y: Vec<Poly<C>> = dir.to_vec();
    let identity_sub = radial
        && dir
            .iter()
            .enumerate()
            .all(|(i, p)| *p == Poly::var(i));
    if !radial {
        for d in 2..top {
            let v: Vec<Poly<C>> = y.iter().map(|p| p.euler()).collect();
            let mut comp = Composer::new(&y, d - 2);
            let mut gam_y = vec![vec![vec![Poly::zero(); m]; m]; m];
            for c in 0..m {
                for a in 0..m {
                    for b in a..m {
                        let p = comp.compose(&conn.christoffel[c][a][b]);
                        gam_y[c][b][a] = p.clone();
                        gam_y[c][a][b] = p;
                    }
                }
            }
            let denom = C::from_int((d * (d - 1)) as i64).inv().neg();
            for c in 0..m {
                let mut acc = Poly::zero();
                for a in 0..m {
                    for b in 0..m {
                        if gam_y[c][a][b].is_zero() {
                            continue;
                        }
                        let vv = v[a].mul_trunc(&v[b], d);
                        gam_y[c][a][b].mul_acc(&vv, d, &mut acc);
                    }
                }
                y[c].add_assign(&acc.homogeneous_part(d).scale(&denom));
            }
        }
    }
    let v: Vec<Poly<C>> = y.iter().map(|p| p.euler()).collect();

    // Γ(Y) and Rm(Y)
    let (gam_y, riem_y) = if identity_sub {
        (conn.christoffel.clone(), conn.riemann.clone())
    } else {
        let mut comp = Composer::new(&y, top);
        let gam_y: Vec<Vec<Vec<Poly<C>>>> = conn
            .christoffel
            .iter()
            .map(|r| r.iter().map(|row| row.iter().map(|p| comp.compose(p)).collect()).collect())
            .collect();
        let mut riem_y = vec![vec![vec![vec![Poly::zero(); m]; m]; m]; m];
        for d in 0..m {
            for a in 0..m {
                for b in (a + 1)..m {
                    for c in 0..m {
                        let p = comp.compose(&conn.riemann[d][a][b][c]);
                        riem_y[d][b][a][c] = p.neg();
                        riem_y[d][a][b][c] = p;
                    }
                }
            }
        }
        (gam_y, riem_y)
    };

    // parallel frame P: P' = -W P, W^c_b = Γ^c_{ab}(Y) V^a
    let pdeg = top - 2;
    let mut w = vec![vec![Poly::zero(); m]; m];
    for c in 0..m {
        for b in 0..m {
            let mut acc = Poly::zero();
            for a in 0..m {
                if !gam_y[c][a][b].is_zero() {
                    gam_y[c][a][b].mul_acc(&v[a], pdeg, &mut acc);
                }
            }
            w[c][b] = acc;
        }
    }
    let mut p = identity::<C>(m);
    for d in 1..=pdeg {
        let wp = mat_mul(&w, &p, d);
        let f = C::from_int(d as i64).inv().neg();
        for i in 0..m {
            for j in 0..m {
                p[i][j].add_assign(&wp[i][j].homogeneous_part(d).scale(&f));
            }
        }
    }

    // M^d_a = R^d_{abc}(Y) V^b V^c
    let mut vv = vec![vec![Poly::zero(); m]; m];
    for b in 0..m {
        for c in b..m {
            let q = v[b].mul_trunc(&v[c], top);
            vv[c][b] = q.clone();
            vv[b][c] = q;
        }
    }
    let mut mm = vec![vec![Poly::zero(); m]; m];
    for d in 0..m {
        for a in 0..m {
            let mut acc = Poly::zero();
            for b in 0..m {
                for c in 0..m {
                    if !riem_y[d][a][b][c].is_zero() && !vv[b][c].is_zero() {
                        riem_y[d][a][b][c].mul_acc(&vv[b][c], top, &mut acc);
                    }
                }
            }
            mm[d][a] = acc;
        }
    }

    // P^{-1} via the Neumann series in N = P - I
    let n: PolyMatrix<C> = mat_map(&mat_add(&p, &mat_map(&identity::<C>(m), |q| q.neg())), |q| q.neg());
    let mut pinv = identity::<C>(m);
    let mut pow = identity::<C>(m);
    for _ in 0..pdeg {
        pow = mat_mul(&pow, &n, pdeg);
        pinv = mat_add(&pinv, &pow);
    }

    let t = mat_mul(&mat_mul(&pinv, &mm, top), &p, top);
    let mut operators = Vec::with_capacity(order - 1);
    let mut fact = C::one();
    for i in 2..=order {
        if i > 2 {
            fact = fact.mul(&C::from_int((i - 2) as i64));
        }
        operators.push(mat_map(&t, |q| q.homogeneous_part(i).scale(&fact)));
    }
    JacobiSeries { operators }
}
