//! Brute-force oracle for common invariant subspaces of small symmetric
//! families, and random families with a known answer.

use nalgebra::DMatrix;
use rand::Rng;

use super::restrict_to_orthogonal;
use crate::error::Result;
use crate::manifold::Matrix;

/// Random symmetric family killing a random unit `x` in `R^m`. When
/// `reducible`, the restricted family is conjugated block-diagonal.
pub fn random_family<R: Rng>(rng: &mut R, m: usize, count: usize, reducible: bool) -> (Vec<Matrix<f64>>, Vec<f64>) {
    let n = m - 1;
    let rot = {
        let a = DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0));
        a.qr().q()
    };
    let split = if reducible { rng.gen_range(1..n) } else { n };
    let ops = (0..count)
        .map(|_| {
            let mut b = DMatrix::zeros(m, m);
            for i in 1..m {
                for j in i..m {
                    if (i - 1 < split) != (j - 1 < split) {
                        continue;
                    }
                    let v = rng.gen_range(-1.0..1.0);
                    b[(i, j)] = v;
                    b[(j, i)] = v;
                }
            }
            let a = &rot * b * rot.transpose();
            (0..m).map(|i| (0..m).map(|j| 0.5 * (a[(i, j)] + a[(j, i)])).collect()).collect()
        })
        .collect();
    let x = rot.column(0).iter().cloned().collect();
    (ops, x)
}

/// Brute force for `n ≤ 3`: a proper nonzero common invariant subspace of a
/// symmetric family exists iff the family has a common eigenvector (its
/// orthogonal complement is then invariant too). Enumerate one eigenvalue
/// cluster per operator and intersect the eigenspaces.
pub fn brute_force_exceptional(bs: &[DMatrix<f64>]) -> bool {
    let n = bs[0].nrows();
    if n < 2 {
        return false;
    }
    let spaces: Vec<Vec<DMatrix<f64>>> = bs
        .iter()
        .map(|b| {
            let (values, vectors) = crate::algebra::symmetric_eigen(b);
            let scale = b.norm().max(1e-300);
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
            let mut groups: Vec<Vec<usize>> = vec![];
            for &i in &idx {
                match groups.last_mut() {
                    Some(g) if (values[i] - values[*g.last().unwrap()]).abs() <= 1e-9 * scale => g.push(i),
                    _ => groups.push(vec![i]),
                }
            }
            groups.iter().map(|g| DMatrix::from_fn(n, g.len(), |r, c| vectors[(r, g[c])])).collect()
        })
        .collect();
    // intersect by projector products: a common unit vector v has P_j v = v for all j
    let mut choice = vec![0usize; bs.len()];
    loop {
        let mut p = DMatrix::identity(n, n);
        for (j, c) in choice.iter().enumerate() {
            let s = &spaces[j][*c];
            p = s * s.transpose() * p;
        }
        let sv = p.svd(false, false).singular_values;
        if sv.max() > 1.0 - 1e-6 {
            return true;
        }
        let mut j = 0;
        loop {
            if j == bs.len() {
                return false;
            }
            choice[j] += 1;
            if choice[j] < spaces[j].len() {
                break;
            }
            choice[j] = 0;
            j += 1;
        }
    }
}


/// Restricts `ops` to `x⊥` and runs [`brute_force_exceptional`].
pub fn brute_force_family(ops: &[Matrix<f64>], x: &[f64]) -> Result<bool> {
    let bs: Vec<DMatrix<f64>> = restrict_to_orthogonal(ops, x, 1e-7)?
        .iter()
        .map(|a| DMatrix::from_fn(a.len(), a.len(), |i, j| a[i][j]))
        .collect();
    Ok(brute_force_exceptional(&bs))
}
