//! Exact jet calculus for metrics at a point.
//!
//! A metric jet is `G_x = I + G¹_x + … + G^k_x` with each `G^i` a homogeneous
//! degree-`i` polynomial map into symmetric matrices; a curvature jet is the
//! array of Jacobi operators `R², …, R^k` at the origin, again as homogeneous
//! polynomial maps of the direction. All arithmetic is over exact rationals.

pub mod format;
pub mod series;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::elim;
use crate::algebra::poly::{mono_degree, monomials_of_degree, Mono, MAX_VARS};
use crate::algebra::{Dual, Poly};
use crate::error::{Error, Result};
use series::{transported_jacobi_series, PolyMatrix};

pub type Q = BigRational;
/// Symmetric `m × m` matrix of polynomials, stored in full.
pub type SymPolyMatrix = PolyMatrix<Q>;

/// Largest supported jet order.
pub const K_MAX: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct MetricJet {
    dim: usize,
    /// `components[i - 1] = G^i`
    components: Vec<SymPolyMatrix>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureJet {
    dim: usize,
    /// `components[i - 2] = R^i`
    components: Vec<SymPolyMatrix>,
}

fn zero_matrix(m: usize) -> SymPolyMatrix {
    vec![vec![Poly::zero(); m]; m]
}

fn check_component(m: usize, deg: usize, c: &SymPolyMatrix) -> Result<()> {
    if c.len() != m || c.iter().any(|r| r.len() != m) {
        return Err(Error::InconsistentJet(format!("degree {deg} component is not {m}x{m}")));
    }
    for a in 0..m {
        for b in 0..m {
            if c[a][b] != c[b][a] {
                return Err(Error::InconsistentJet(format!("degree {deg} component not symmetric at ({a},{b})")));
            }
            for (mono, _) in c[a][b].terms() {
                if mono_degree(mono) != deg || mono[m..].iter().any(|&e| e != 0) {
                    return Err(Error::InconsistentJet(format!(
                        "degree {deg} component has a term {mono:?} of the wrong degree or variable"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// `S_x · x` as a vector of polynomials.
fn apply_to_direction(s: &SymPolyMatrix) -> Vec<Poly<Q>> {
    let m = s.len();
    (0..m)
        .map(|a| {
            let mut acc = Poly::zero();
            for b in 0..m {
                acc.add_assign(&s[a][b].mul(&Poly::var(b)));
            }
            acc
        })
        .collect()
}

/// First nonzero coefficient of `G^i_x · x`, witnessing non-normality.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalityViolation {
    pub degree: usize,
    pub component: usize,
    pub monomial: Mono,
    pub coefficient: Q,
}

impl MetricJet {
    pub fn new(dim: usize, components: Vec<SymPolyMatrix>) -> Result<Self> {
        if !(1..=MAX_VARS).contains(&dim) {
            return Err(Error::InvalidParameter(format!("jet dimension {dim} not in 1..={MAX_VARS}")));
        }
        if components.len() > K_MAX {
            return Err(Error::InvalidOrder(components.len()));
        }
        for (i, c) in components.iter().enumerate() {
            check_component(dim, i + 1, c)?;
        }
        Ok(MetricJet { dim, components })
    }

    pub fn zero(dim: usize, order: usize) -> Self {
        MetricJet { dim, components: vec![zero_matrix(dim); order] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.components.len()
    }

    /// `G^i`, `1 ≤ i ≤ order`.
    pub fn component(&self, i: usize) -> &SymPolyMatrix {
        &self.components[i - 1]
    }

    pub fn components(&self) -> &[SymPolyMatrix] {
        &self.components
    }

    pub fn set_component(&mut self, i: usize, c: SymPolyMatrix) -> Result<()> {
        check_component(self.dim, i, &c)?;
        self.components[i - 1] = c;
        Ok(())
    }

    /// The same jet truncated (or zero-padded) to `order`.
    pub fn with_order(&self, order: usize) -> Self {
        let mut components: Vec<_> = self.components.iter().take(order).cloned().collect();
        while components.len() < order {
            components.push(zero_matrix(self.dim));
        }
        MetricJet { dim: self.dim, components }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.iter().all(|r| r.iter().all(|p| p.is_zero())))
    }

    /// The full metric polynomial `I + Σ G^i`.
    pub fn metric_polynomial(&self) -> SymPolyMatrix {
        let m = self.dim;
        let mut g = series::identity::<Q>(m);
        for c in &self.components {
            for a in 0..m {
                for b in 0..m {
                    g[a][b].add_assign(&c[a][b]);
                }
            }
        }
        g
    }

    /// Checks `G^i_x · x = 0` for every component, as polynomial identities.
    pub fn check_normal(&self) -> std::result::Result<(), NormalityViolation> {
        for (i, c) in self.components.iter().enumerate() {
            for (a, p) in apply_to_direction(c).iter().enumerate() {
                if let Some((mono, coef)) = p.terms().next() {
                    return Err(NormalityViolation {
                        degree: i + 1,
                        component: a,
                        monomial: *mono,
                        coefficient: coef.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_normal(&self) -> bool {
        self.check_normal().is_ok()
    }
}

impl CurvatureJet {
    /// Validates degrees, symmetry and `R^i_x · x = 0`.
    pub fn new(dim: usize, components: Vec<SymPolyMatrix>) -> Result<Self> {
        if !(1..=MAX_VARS).contains(&dim) {
            return Err(Error::InvalidParameter(format!("jet dimension {dim} not in 1..={MAX_VARS}")));
        }
        if components.len() + 1 > K_MAX {
            return Err(Error::InvalidOrder(components.len() + 1));
        }
        for (i, c) in components.iter().enumerate() {
            check_component(dim, i + 2, c)?;
            if apply_to_direction(c).iter().any(|p| !p.is_zero()) {
                return Err(Error::InconsistentJet(format!("R^{} does not annihilate the direction", i + 2)));
            }
        }
        Ok(CurvatureJet { dim, components })
    }

    pub fn zero(dim: usize, order: usize) -> Self {
        CurvatureJet { dim, components: vec![zero_matrix(dim); order.saturating_sub(1)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.components.len() + 1
    }

    /// `R^i`, `2 ≤ i ≤ order`.
    pub fn component(&self, i: usize) -> &SymPolyMatrix {
        &self.components[i - 2]
    }

    pub fn components(&self) -> &[SymPolyMatrix] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.iter().all(|r| r.iter().all(|p| p.is_zero())))
    }

    /// `R^i_x` at a rational direction.
    pub fn operator_at(&self, i: usize, x: &[Q]) -> Vec<Vec<Q>> {
        self.component(i)
            .iter()
            .map(|r| r.iter().map(|p| p.eval(x)).collect())
            .collect()
    }
}

fn check_dims(m: usize, k: usize) -> Result<()> {
    if !(2..=MAX_VARS).contains(&m) {
        return Err(Error::InvalidParameter(format!("dimension {m} not in 2..={MAX_VARS}")));
    }
    if !(2..=K_MAX).contains(&k) {
        return Err(Error::InvalidOrder(k));
    }
    Ok(())
}

/// The curvature-jet map: Jacobi operators `R², …, R^k` at the origin of the
/// polynomial metric `I + Σ G^i`.
pub fn rho(jet: &MetricJet) -> Result<CurvatureJet> {
    let m = jet.dim;
    let k = jet.order();
    check_dims(m, k)?;
    let g = jet.metric_polynomial();
    let dir: Vec<Poly<Q>> = (0..m).map(Poly::var).collect();
    let series = transported_jacobi_series(&g, &dir, k, jet.is_normal());
    Ok(CurvatureJet { dim: m, components: series.operators })
}

/// Coordinates of a homogeneous degree-`deg` symmetric polynomial matrix:
/// entries `a ≤ b` in row-major order, then monomials in canonical order.
pub fn sym_coordinates<C: crate::algebra::Coeff>(s: &PolyMatrix<C>, deg: usize) -> Vec<C> {
    let m = s.len();
    let monos = monomials_of_degree(m, deg);
    let mut out = Vec::new();
    for a in 0..m {
        for b in a..m {
            for mono in &monos {
                out.push(s[a][b].coeff(mono));
            }
        }
    }
    out
}

fn from_sym_coordinates(m: usize, deg: usize, coords: &[Q]) -> SymPolyMatrix {
    let monos = monomials_of_degree(m, deg);
    let mut s = zero_matrix(m);
    let mut idx = 0;
    for a in 0..m {
        for b in a..m {
            for mono in &monos {
                s[a][b].add_term(*mono, coords[idx].clone());
                idx += 1;
            }
            s[b][a] = s[a][b].clone();
        }
    }
    s
}

/// Basis of the space of degree-`deg` symmetric-matrix-valued homogeneous
/// polynomials `S` with `S_x · x = 0` (cached per `(m, deg)`).
pub fn admissible_basis(m: usize, deg: usize) -> Arc<Vec<SymPolyMatrix>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Vec<SymPolyMatrix>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().expect("basis cache").get(&(m, deg)) {
        return b.clone();
    }
    let monos = monomials_of_degree(m, deg);
    let out_monos = monomials_of_degree(m, deg + 1);
    let nsym = m * (m + 1) / 2;
    let ncols = nsym * monos.len();
    let out_index: HashMap<Mono, usize> = out_monos.iter().enumerate().map(|(i, mo)| (*mo, i)).collect();
    let mut rows = vec![vec![Q::zero(); ncols]; m * out_monos.len()];
    let mut col = 0;
    for a in 0..m {
        for b in a..m {
            for mono in &monos {
                // entry (a,b) contributes to row a via x_b and to row b via x_a
                let mut push = |row_comp: usize, var: usize| {
                    let mut mm = *mono;
                    mm[var] += 1;
                    let r = row_comp * out_monos.len() + out_index[&mm];
                    rows[r][col] += Q::one();
                };
                push(a, b);
                if a != b {
                    push(b, a);
                }
                col += 1;
            }
        }
    }
    let basis: Vec<SymPolyMatrix> = elim::null_space(&rows, ncols)
        .into_iter()
        .map(|v| from_sym_coordinates(m, deg, &v))
        .collect();
    let basis = Arc::new(basis);
    cache.lock().expect("basis cache").insert((m, deg), basis.clone());
    basis
}

/// Dimension of the space of symmetric-matrix-valued homogeneous polynomials
/// of degree `deg` in `m` variables.
pub fn sym_poly_dim(m: usize, deg: usize) -> usize {
    m * (m + 1) / 2 * monomials_of_degree(m, deg).len()
}

/// The rank-one admissible polynomial of degree `deg` with value
/// `c · y yᵀ` at `w = x`, for `y ⊥ x`:
/// `c'·⟨w,x⟩^{deg-2}(⟨w,x⟩² yyᵀ − ⟨w,x⟩⟨w,y⟩(xyᵀ+yxᵀ) + ⟨w,y⟩² xxᵀ)`.
pub fn rank_one_term(x: &[Q], y: &[Q], c: &Q, deg: usize) -> SymPolyMatrix {
    let m = x.len();
    let xx: Q = x.iter().map(|v| v * v).sum();
    let mut norm_pow = Q::one();
    for _ in 0..deg {
        norm_pow *= &xx;
    }
    let cc = c / norm_pow;
    let wx = Poly::linear(x);
    let wy = Poly::linear(y);
    let mut lead = Poly::constant(cc);
    for _ in 0..deg - 2 {
        lead = lead.mul(&wx);
    }
    let t_yy = lead.mul(&wx).mul(&wx);
    let t_xy = lead.mul(&wx).mul(&wy).neg();
    let t_xx = lead.mul(&wy).mul(&wy);
    let mut s = zero_matrix(m);
    for a in 0..m {
        for b in 0..m {
            let mut p = t_yy.scale(&(&y[a] * &y[b]));
            p.add_assign(&t_xy.scale(&(&x[a] * &y[b] + &y[a] * &x[b])));
            p.add_assign(&t_xx.scale(&(&x[a] * &x[b])));
            s[a][b] = p;
        }
    }
    s
}

/// Top-degree coefficient `c_i` with `G^i = c_i · R^i` for single-component
/// normal jets, found by probing `rho` and verified on a full basis.
pub fn top_degree_coefficient(m: usize, deg: usize) -> Result<Q> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Q>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().expect("coefficient cache").get(&(m, deg)) {
        return Ok(c.clone());
    }
    check_dims(m, deg)?;
    let mut e1 = vec![Q::zero(); m];
    e1[0] = Q::one();
    let mut e2 = vec![Q::zero(); m];
    e2[1] = Q::one();
    let probe = rank_one_term(&e1, &e2, &Q::one(), deg);
    let r = rho(&single_component_jet(m, deg, probe.clone()))?;
    let c = proportionality(&probe, r.component(deg))
        .ok_or_else(|| Error::InconsistentJet(format!("degree {deg}: top-degree map is not scalar on the probe")))?;
    for b in admissible_basis(m, deg).iter() {
        let r = rho(&single_component_jet(m, deg, b.clone()))?;
        match proportionality(b, r.component(deg)) {
            Some(cb) if cb == c => {}
            _ => {
                return Err(Error::InconsistentJet(format!(
                    "degree {deg}: top-degree map is not scalar on the admissible basis"
                )))
            }
        }
    }
    cache.lock().expect("coefficient cache").insert((m, deg), c.clone());
    Ok(c)
}

/// `Some(c)` with `g = c · r` when `r ≠ 0` and the two are proportional.
pub fn proportionality(g: &SymPolyMatrix, r: &SymPolyMatrix) -> Option<Q> {
    let m = g.len();
    let mut c: Option<Q> = None;
    for a in 0..m {
        for b in 0..m {
            for (mono, rv) in r[a][b].terms() {
                let ratio = g[a][b].coeff(mono) / rv;
                match &c {
                    None => c = Some(ratio),
                    Some(c0) if *c0 == ratio => {}
                    Some(_) => return None,
                }
            }
        }
    }
    let c = c?;
    for a in 0..m {
        for b in 0..m {
            if g[a][b] != r[a][b].scale(&c) {
                return None;
            }
        }
    }
    Some(c)
}

/// A jet of order `deg` whose only nonzero component is `G^deg = s`.
pub fn single_component_jet(m: usize, deg: usize, s: SymPolyMatrix) -> MetricJet {
    let mut j = MetricJet::zero(m, deg);
    j.components[deg - 1] = s;
    j
}

/// Normal metric jet with the given curvature jet, built degree by degree.
pub fn inverse_rho(r: &CurvatureJet) -> Result<MetricJet> {
    let m = r.dim;
    let k = r.order();
    if k < 2 {
        return Ok(MetricJet::zero(m, k));
    }
    check_dims(m, k)?;
    // revalidate: callers may have built the jet through `new`, but keep the
    // contract local
    for (i, c) in r.components.iter().enumerate() {
        if apply_to_direction(c).iter().any(|p| !p.is_zero()) {
            return Err(Error::InconsistentJet(format!("R^{} does not annihilate the direction", i + 2)));
        }
    }
    let mut g = MetricJet::zero(m, k);
    for i in 2..=k {
        let c = top_degree_coefficient(m, i)?;
        let partial = g.with_order(i);
        let lower = if partial.is_zero() {
            zero_matrix(m)
        } else {
            rho(&partial)?.components[i - 2].clone()
        };
        let target = r.component(i);
        let mut gi = zero_matrix(m);
        for a in 0..m {
            for b in 0..m {
                gi[a][b] = target[a][b].sub(&lower[a][b]).scale(&c);
            }
        }
        g.components[i - 1] = gi;
    }
    Ok(g)
}

/// Re-expresses an arbitrary jet in normal coordinates: the unique normal jet
/// with the same curvature jet.
pub fn normalize_jet(jet: &MetricJet) -> Result<MetricJet> {
    if jet.is_normal() {
        return Ok(jet.clone());
    }
    inverse_rho(&rho(jet)?)
}

/// Rational orthogonal-complement basis `q_j = x_p e_j − x_j e_p` (`j ≠ p`).
fn complement_basis(x: &[Q]) -> Vec<Vec<Q>> {
    let m = x.len();
    let p = (0..m).find(|&i| !x[i].is_zero()).expect("nonzero direction");
    (0..m)
        .filter(|&j| j != p)
        .map(|j| {
            let mut q = vec![Q::zero(); m];
            q[j] = x[p].clone();
            q[p] = -x[j].clone();
            q
        })
        .collect()
}

/// Builds a normal jet whose Jacobi operators at `(0, x)` are `ops[i] = A_{i+2}`.
pub fn prescribe_jacobi(x: &[Q], ops: &[Vec<Vec<Q>>]) -> Result<MetricJet> {
    let m = x.len();
    if x.iter().all(|v| v.is_zero()) {
        return Err(Error::ZeroDirection);
    }
    let k = ops.len() + 1;
    check_dims(m, k.max(2))?;
    for (idx, a) in ops.iter().enumerate() {
        if a.len() != m || a.iter().any(|r| r.len() != m) {
            return Err(Error::InadmissibleOperator(format!("A_{} is not {m}x{m}", idx + 2)));
        }
        for i in 0..m {
            for j in 0..m {
                if a[i][j] != a[j][i] {
                    return Err(Error::InadmissibleOperator(format!("A_{} is not symmetric", idx + 2)));
                }
            }
            let ax: Q = (0..m).map(|j| &a[i][j] * &x[j]).sum();
            if !ax.is_zero() {
                return Err(Error::InadmissibleOperator(format!("A_{} does not annihilate x", idx + 2)));
            }
        }
    }
    let qs = complement_basis(x);
    let n = qs.len();
    // Gram matrix and its inverse
    let gram: Vec<Vec<Q>> = (0..n)
        .map(|i| (0..n).map(|j| qs[i].iter().zip(&qs[j]).map(|(a, b)| a * b).sum()).collect())
        .collect();
    let gram_inv = elim::inverse(&gram).expect("complement basis is independent");
    let mut comps = Vec::with_capacity(ops.len());
    for (idx, a) in ops.iter().enumerate() {
        let deg = idx + 2;
        // B = G⁻¹ Qᵀ A Q G⁻¹
        let qta_q: Vec<Vec<Q>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut s = Q::zero();
                        for u in 0..m {
                            for v in 0..m {
                                s += &qs[i][u] * &a[u][v] * &qs[j][v];
                            }
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        let b = mat_q(&mat_q(&gram_inv, &qta_q), &gram_inv);
        let mut terms: Vec<(Vec<Q>, Q)> = Vec::new();
        for i in 0..n {
            if !b[i][i].is_zero() {
                terms.push((qs[i].clone(), b[i][i].clone()));
            }
            for j in (i + 1)..n {
                if b[i][j].is_zero() {
                    continue;
                }
                let half = &b[i][j] / Q::from_integer(2.into());
                let plus: Vec<Q> = qs[i].iter().zip(&qs[j]).map(|(u, v)| u + v).collect();
                let minus: Vec<Q> = qs[i].iter().zip(&qs[j]).map(|(u, v)| u - v).collect();
                terms.push((plus, half.clone()));
                terms.push((minus, -half));
            }
        }
        let mut s = zero_matrix(m);
        let mut check = vec![vec![Q::zero(); m]; m];
        for (y, c) in &terms {
            let t = rank_one_term(x, y, c, deg);
            for u in 0..m {
                for v in 0..m {
                    s[u][v].add_assign(&t[u][v]);
                    check[u][v] += c * &y[u] * &y[v];
                }
            }
        }
        if check != *a {
            return Err(Error::InadmissibleOperator(format!("A_{deg} is not spanned by x-orthogonal projections")));
        }
        comps.push(s);
    }
    let r = CurvatureJet::new(m, comps)?;
    inverse_rho(&r)
}

fn mat_q(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = a.len();
    let p = b[0].len();
    (0..n)
        .map(|i| (0..p).map(|j| (0..b.len()).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
        .collect()
}

/// Rank of the differential of `rho` at a base jet, with the dimensions of
/// the jet spaces involved.
#[derive(Clone, Debug, PartialEq)]
pub struct RankReport {
    pub dim: usize,
    pub order: usize,
    /// dimension of all jets `G^k` (components of degree 1..k)
    pub dim_metric_jets: usize,
    /// dimension of normal jets, which equals that of curvature jets
    pub dim_normal_jets: usize,
    pub dim_curvature_jets: usize,
    /// rank on all of `G^k`
    pub rank: usize,
    /// rank restricted to normal directions, when the base is normal
    pub rank_normal: Option<usize>,
}

impl RankReport {
    pub fn is_submersion(&self) -> bool {
        self.rank == self.dim_curvature_jets
    }

    pub fn normal_restriction_bijective(&self) -> Option<bool> {
        self.rank_normal
            .map(|r| r == self.dim_curvature_jets && self.dim_normal_jets == self.dim_curvature_jets)
    }
}

fn dual_rho_column(base: &MetricJet, dir: &MetricJet, radial: bool) -> Vec<Q> {
    let m = base.dim;
    let k = base.order();
    let gb = base.metric_polynomial();
    let mut g: PolyMatrix<Dual<Q>> = vec![vec![Poly::zero(); m]; m];
    for a in 0..m {
        for b in 0..m {
            let mut p = gb[a][b].map_coeffs(|c| Dual::new(c.clone(), Q::zero()));
            for comp in &dir.components {
                p.add_assign(&comp[a][b].map_coeffs(|c| Dual::new(Q::zero(), c.clone())));
            }
            g[a][b] = p;
        }
    }
    let xdir: Vec<Poly<Dual<Q>>> = (0..m).map(Poly::var).collect();
    let s = transported_jacobi_series(&g, &xdir, k, radial);
    let mut col = Vec::new();
    for (i, op) in s.operators.iter().enumerate() {
        let eps: PolyMatrix<Q> = op.iter().map(|r| r.iter().map(|p| p.map_coeffs(|c| c.eps.clone())).collect()).collect();
        col.extend(sym_coordinates(&eps, i + 2));
    }
    col
}

/// Rank of `dρ_k` at `base`, computed from exact directional derivatives
/// along every coordinate jet (and along a basis of normal jets when the base
/// is normal).
pub fn rho_differential_rank(base: &MetricJet, order: usize) -> Result<RankReport> {
    let m = base.dim;
    check_dims(m, order)?;
    let base = base.with_order(order);
    let base_normal = base.is_normal();
    let dim_metric_jets: usize = (1..=order).map(|i| sym_poly_dim(m, i)).sum();
    let dim_normal_jets: usize = (1..=order).map(|i| admissible_basis(m, i).len()).sum();
    let dim_curvature_jets: usize = (2..=order).map(|i| admissible_basis(m, i).len()).sum();

    let mut columns = Vec::new();
    for i in 1..=order {
        let monos = monomials_of_degree(m, i);
        for a in 0..m {
            for b in a..m {
                for mono in &monos {
                    let mut s = zero_matrix(m);
                    s[a][b] = Poly::monomial(*mono, Q::one());
                    s[b][a] = s[a][b].clone();
                    let dir = single_component_jet(m, i, s).with_order(order);
                    columns.push(dual_rho_column(&base, &dir, false));
                }
            }
        }
    }
    let rank = elim::rank(&transpose(&columns));

    let rank_normal = if base_normal {
        let mut ncols = Vec::new();
        for i in 1..=order {
            for b in admissible_basis(m, i).iter() {
                let dir = single_component_jet(m, i, b.clone()).with_order(order);
                ncols.push(dual_rho_column(&base, &dir, true));
            }
        }
        Some(if ncols.is_empty() { 0 } else { elim::rank(&transpose(&ncols)) })
    } else {
        None
    };
    Ok(RankReport {
        dim: m,
        order,
        dim_metric_jets,
        dim_normal_jets,
        dim_curvature_jets,
        rank,
        rank_normal,
    })
}

fn transpose(cols: &[Vec<Q>]) -> Vec<Vec<Q>> {
    if cols.is_empty() {
        return Vec::new();
    }
    let n = cols[0].len();
    (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
}

/// Random element of the admissible space of curvature jets: small-integer
/// combinations of the cached basis in each degree.
pub fn random_curvature_jet<R: rand::Rng>(m: usize, order: usize, rng: &mut R, spread: i64) -> Result<CurvatureJet> {
    check_dims(m, order)?;
    let mut comps = Vec::new();
    for i in 2..=order {
        let basis = admissible_basis(m, i);
        let mut s = zero_matrix(m);
        for b in basis.iter() {
            let c = Q::new(rng.gen_range(-spread..=spread).into(), rng.gen_range(1..=3i64).into());
            if c.is_zero() {
                continue;
            }
            for u in 0..m {
                for v in 0..m {
                    s[u][v].add_assign(&b[u][v].scale(&c));
                }
            }
        }
        comps.push(s);
    }
    CurvatureJet::new(m, comps)
}

/// Random (generally non-normal) metric jet with small rational coefficients.
pub fn random_metric_jet<R: rand::Rng>(m: usize, order: usize, rng: &mut R, spread: i64) -> MetricJet {
    let mut j = MetricJet::zero(m, order);
    for i in 1..=order {
        let monos = monomials_of_degree(m, i);
        let mut s = zero_matrix(m);
        for a in 0..m {
            for b in a..m {
                for mono in &monos {
                    let c = Q::new(rng.gen_range(-spread..=spread).into(), rng.gen_range(1..=4i64).into());
                    s[a][b].add_term(*mono, c);
                }
                s[b][a] = s[a][b].clone();
            }
        }
        j.components[i - 1] = s;
    }
    j
}

#[cfg(test)]
mod tests;
