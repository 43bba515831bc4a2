//! Common invariant subspaces of symmetric operator families.

use nalgebra::{DMatrix, DVector};

use crate::algebra::symmetric_eigen;

use crate::error::{Error, Result};
use crate::manifold::Matrix;
use crate::Tolerances;

pub(crate) fn to_dm(a: &Matrix<f64>) -> DMatrix<f64> {
    let n = a.len();
    DMatrix::from_fn(n, n, |i, j| a[i][j])
}

pub(crate) fn from_dm(a: &DMatrix<f64>) -> Matrix<f64> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect()).collect()
}

/// Householder reflection `H` with `H e₁ ∥ x`; the returned columns `2..m`
/// are an orthonormal basis of `x^⊥`.
pub fn orthogonal_complement_basis(x: &[f64]) -> Result<DMatrix<f64>> {
    let m = x.len();
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroDirection);
    }
    let mut u: Vec<f64> = x.iter().map(|v| v / norm).collect();
    u[0] += if u[0] >= 0.0 { 1.0 } else { -1.0 };
    let uu: f64 = u.iter().map(|v| v * v).sum();
    let h = DMatrix::from_fn(m, m, |i, j| if i == j { 1.0 } else { 0.0 } - 2.0 * u[i] * u[j] / uu);
    Ok(h.columns(1, m - 1).into_owned())
}

/// `B_i = Qᵀ A_i Q` on `x^⊥`. Each `A_i` must be symmetric and kill `x`, to
/// `tol` relative to its size.
pub fn restrict_to_orthogonal(ops: &[Matrix<f64>], x: &[f64], tol: f64) -> Result<Vec<Matrix<f64>>> {
    let q = orthogonal_complement_basis(x)?;
    let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let xv = DVector::from_column_slice(x);
    ops.iter()
        .enumerate()
        .map(|(i, a)| {
            if a.len() != x.len() {
                return Err(Error::InadmissibleOperator(format!("operator {} has the wrong size", i + 2)));
            }
            let a = to_dm(a);
            let scale = a.norm().max(1.0);
            if (&a - a.transpose()).norm() > tol * scale {
                return Err(Error::InadmissibleOperator(format!("operator {} is not symmetric", i + 2)));
            }
            if (&a * &xv).norm() > tol * scale * xn {
                return Err(Error::InadmissibleOperator(format!("operator {} does not annihilate x", i + 2)));
            }
            Ok(from_dm(&(q.transpose() * a * &q)))
        })
        .collect()
}

/// Orthonormal basis of symmetric `n × n` matrices: `E_ii` and `(E_ij + E_ji)/√2`.
fn sym_basis(n: usize) -> Vec<DMatrix<f64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut e = DMatrix::zeros(n, n);
            if i == j {
                e[(i, i)] = 1.0;
            } else {
                e[(i, j)] = s;
                e[(j, i)] = s;
            }
            out.push(e);
        }
    }
    out
}

/// Matrix of `C ↦ ([C, B_i])_i` from symmetric coordinates to orthonormal
/// antisymmetric coordinates, padded with zero rows so it is at least square.
fn commutator_system(bs: &[DMatrix<f64>], n: usize) -> DMatrix<f64> {
    let basis = sym_basis(n);
    let anti = n * (n - 1) / 2;
    let rows = (bs.len() * anti).max(basis.len());
    let mut sys = DMatrix::zeros(rows, basis.len());
    for (col, e) in basis.iter().enumerate() {
        for (k, b) in bs.iter().enumerate() {
            let c = e * b - b * e;
            let mut r = k * anti;
            for i in 0..n {
                for j in (i + 1)..n {
                    sys[(r, col)] = c[(i, j)] * std::f64::consts::SQRT_2;
                    r += 1;
                }
            }
        }
    }
    sys
}

fn from_sym_coords(coords: &[f64], n: usize) -> DMatrix<f64> {
    let mut c = DMatrix::zeros(n, n);
    for (e, w) in sym_basis(n).iter().zip(coords) {
        c += e * *w;
    }
    c
}

/// Symmetric commutant `{C = Cᵀ : C B_i = B_i C}`.
#[derive(Clone, Debug)]
pub struct Commutant {
    pub dim: usize,
    /// Frobenius-orthonormal basis
    pub basis: Vec<Matrix<f64>>,
    pub singular_values: Vec<f64>,
}

/// `max(σ_max, max_i ‖B_i‖_F)`: the commutator system alone has no scale
/// when the family is scalar up to rounding.
fn system_scale(bs: &[DMatrix<f64>], smax: f64) -> f64 {
    bs.iter().map(|b| b.norm()).fold(smax, f64::max)
}

/// Null space of the commutator system; singular values at most
/// `rank_tol` times the family scale count as zero.
pub fn symmetric_commutant(bs: &[Matrix<f64>], rank_tol: f64) -> Commutant {
    let n = bs.first().map(|b| b.len()).unwrap_or(0);
    if n == 0 {
        return Commutant { dim: 0, basis: vec![], singular_values: vec![] };
    }
    let bm: Vec<DMatrix<f64>> = bs.iter().map(to_dm).collect();
    let sys = commutator_system(&bm, n);
    let svd = sys.svd(true, true);
    let vt = svd.v_t.expect("right singular vectors");
    let sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    let scale = system_scale(&bm, sv.iter().cloned().fold(0.0, f64::max));
    let mut basis = Vec::new();
    for (idx, s) in sv.iter().enumerate() {
        if scale == 0.0 || *s <= rank_tol * scale {
            let coords: Vec<f64> = vt.row(idx).iter().cloned().collect();
            basis.push(from_dm(&from_sym_coords(&coords, n)));
        }
    }
    Commutant { dim: basis.len(), basis, singular_values: sv }
}

pub fn symmetric_commutant_dim(bs: &[Matrix<f64>]) -> usize {
    symmetric_commutant(bs, Tolerances::default().margin).dim
}

/// Smallest singular value of the commutator system on the complement of the
/// identity, absolute and divided by `max(σ_max, max_i ‖B_i‖_F)`. Infinite when `n = 1`, zero
/// when every `B_i` vanishes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Margin {
    pub absolute: f64,
    pub relative: f64,
}

/// Margin together with the minimizing traceless symmetric matrix.
fn margin_with_element(bs: &[Matrix<f64>]) -> (Margin, Option<DMatrix<f64>>) {
    let n = bs.first().map(|b| b.len()).unwrap_or(0);
    if n <= 1 {
        return (Margin { absolute: f64::INFINITY, relative: f64::INFINITY }, None);
    }
    let sb = sym_basis(n);
    let d = sb.len();
    let bm: Vec<DMatrix<f64>> = bs.iter().map(to_dm).collect();
    let sys = commutator_system(&bm, n);
    let scale = system_scale(&bm, sys.clone().svd(false, false).singular_values.max());
    let mut id = DVector::zeros(d);
    for (k, e) in sb.iter().enumerate() {
        id[k] = e.trace();
    }
    id /= id.norm();
    let mut full = DMatrix::identity(d, d);
    full.set_column(0, &id);
    let q = full.qr().q();
    let comp = q.columns(1, d - 1).into_owned();
    let svd = (&sys * &comp).svd(true, true);
    let (imin, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, s)| if *s < acc.1 { (i, *s) } else { acc });
    let vt = svd.v_t.expect("right singular vectors");
    let coords = &comp * vt.row(imin).transpose();
    let coords: Vec<f64> = coords.iter().cloned().collect();
    let relative = if scale == 0.0 { 0.0 } else { smin / scale };
    (Margin { absolute: smin, relative }, Some(from_sym_coords(&coords, n)))
}

pub fn irreducibility_margin(bs: &[Matrix<f64>]) -> Margin {
    margin_with_element(bs).0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Exceptional,
    NotExceptional,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Exceptional => "exceptional",
            Verdict::NotExceptional => "not-exceptional",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Zero up to `tau`, inconclusive up to `10 tau`.
pub fn verdict_from_margin(rel: f64, tau: f64) -> Verdict {
    if rel <= tau {
        Verdict::Exceptional
    } else if rel <= 10.0 * tau {
        Verdict::Inconclusive
    } else {
        Verdict::NotExceptional
    }
}

#[derive(Clone, Debug)]
pub struct ExceptionalityReport {
    pub verdict: Verdict,
    /// orthonormal basis of `V`, first vector `x/|x|`; same frame as the operators
    pub witness: Option<Vec<Vec<f64>>>,
    pub margin: Margin,
    pub commutant_dim: usize,
    pub witness_residual: Option<f64>,
}

/// Eigenvectors of a symmetric matrix grouped by eigenvalues within `gap`.
pub(crate) fn eigen_clusters(c: &DMatrix<f64>, gap: f64) -> Vec<DMatrix<f64>> {
    let (values, vectors) = symmetric_eigen(c);
    let mut order: Vec<usize> = (0..c.nrows()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match clusters.last_mut() {
            Some(cl) if values[i] - values[*cl.last().expect("nonempty")] <= gap => cl.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    clusters
        .iter()
        .map(|cl| DMatrix::from_fn(c.nrows(), cl.len(), |r, k| vectors[(r, cl[k])]))
        .collect()
}

/// `max_i ‖(I − P_V) A_i P_V‖_F / max_i ‖A_i‖_F` for orthonormal columns `V`.
pub fn invariance_residual(ops: &[Matrix<f64>], v: &DMatrix<f64>) -> f64 {
    let p = v * v.transpose();
    let id = DMatrix::identity(p.nrows(), p.nrows());
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for a in ops {
        let a = to_dm(a);
        scale = scale.max(a.norm());
        worst = worst.max(((&id - &p) * &a * &p).norm());
    }
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

/// Whether symmetric `A₂, …, A_k` killing `x` share an invariant subspace
/// `V ∋ x` with `1 < dim V < m`.
pub fn analyze_family(ops: &[Matrix<f64>], x: &[f64], tol: &Tolerances) -> Result<ExceptionalityReport> {
    let m = x.len();
    let bs = restrict_to_orthogonal(ops, x, tol.sym.max(1e-7))?;
    let commutant = symmetric_commutant(&bs, tol.margin);
    let (margin, element) = margin_with_element(&bs);
    let verdict = if m < 3 { Verdict::NotExceptional } else { verdict_from_margin(margin.relative, tol.margin) };
    let mut report =
        ExceptionalityReport { verdict, witness: None, margin, commutant_dim: commutant.dim, witness_residual: None };
    if verdict != Verdict::Exceptional {
        return Ok(report);
    }
    let c = element.expect("non-scalar element for n ≥ 2");
    let clusters = eigen_clusters(&c, 1e-6 * c.norm().max(f64::MIN_POSITIVE));
    if clusters.len() < 2 {
        report.verdict = Verdict::Inconclusive;
        return Ok(report);
    }
    let q = orthogonal_complement_basis(x)?;
    let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut cols: Vec<DVector<f64>> = vec![DVector::from_iterator(m, x.iter().map(|v| v / xn))];
    for cl in &clusters[1..] {
        for k in 0..cl.ncols() {
            cols.push(&q * cl.column(k));
        }
    }
    let v = DMatrix::from_columns(&cols);
    let res = invariance_residual(ops, &v);
    report.witness_residual = Some(res);
    if res <= tol.inv {
        report.witness = Some((0..v.ncols()).map(|k| v.column(k).iter().cloned().collect()).collect());
    } else {
        report.verdict = Verdict::Inconclusive;
    }
    Ok(report)
}
