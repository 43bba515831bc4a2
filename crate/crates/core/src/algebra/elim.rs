//! Gaussian elimination over an arbitrary [`Coeff`] field. With exact
//! rationals every result here is exact.

use super::coeff::Coeff;

/// Row-reduces `rows` in place; returns the pivot columns.
pub fn row_reduce<C: Coeff>(rows: &mut [Vec<C>]) -> Vec<usize> {
    let nrows = rows.len();
    if nrows == 0 {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv();
        for v in rows[r].iter_mut().skip(c) {
            *v = v.mul(&inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !pv.is_zero() {
                    *v = v.sub(&f.mul(pv));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<C: Coeff>(rows: &[Vec<C>]) -> usize {
    let mut m = rows.to_vec();
    row_reduce(&mut m).len()
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse<C: Coeff>(a: &[Vec<C>]) -> Option<Vec<Vec<C>>> {
    let n = a.len();
    let mut aug: Vec<Vec<C>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { C::one() } else { C::zero() }));
            r
        })
        .collect();
    let piv = row_reduce(&mut aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `A x = b` for square nonsingular `A`.
pub fn solve<C: Coeff>(a: &[Vec<C>], b: &[C]) -> Option<Vec<C>> {
    let n = a.len();
    let mut aug: Vec<Vec<C>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let piv = row_reduce(&mut aug);
    if piv.len() < n || piv.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n].clone()).collect())
}

/// Basis of the null space `{x : A x = 0}`.
pub fn null_space<C: Coeff>(a: &[Vec<C>], ncols: usize) -> Vec<Vec<C>> {
    let mut m = a.to_vec();
    let piv = row_reduce(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![C::zero(); ncols];
            x[f] = C::one();
            for (r, &pc) in piv.iter().enumerate() {
                x[pc] = m[r][f].neg();
            }
            x
        })
        .collect()
}
