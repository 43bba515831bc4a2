//! Connection and curvature of a chart metric at a point.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::jets::series::connection;

use super::metric::{Matrix, MetricField};

/// Christoffel symbols and the curvature tensor at one point, in chart
/// coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureData {
    pub point: Vec<f64>,
    pub metric: Matrix<f64>,
    /// `christoffel[c][a][b] = Γ^c_{ab}`
    pub christoffel: Vec<Matrix<f64>>,
    /// `riemann[d][a][b][c] = R^d_{abc}`, with `Rm(∂a, ∂b)∂c = R^d_{abc} ∂d`
    pub riemann: Vec<Vec<Matrix<f64>>>,
}

/// Largest violations of the curvature identities.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureResiduals {
    pub antisymmetry: f64,
    pub bianchi: f64,
    pub pair_symmetry: f64,
}

impl CurvatureData {
    pub fn at(metric: &MetricField, p: &[f64]) -> Result<Self> {
        let m = metric.dim();
        let g = metric.expansion(p, 2)?;
        let conn = connection(&g, 1);
        let christoffel = (0..m)
            .map(|c| (0..m).map(|a| (0..m).map(|b| conn.christoffel[c][a][b].constant_term()).collect()).collect())
            .collect();
        let riemann = (0..m)
            .map(|d| {
                (0..m)
                    .map(|a| (0..m).map(|b| (0..m).map(|c| conn.riemann[d][a][b][c].constant_term()).collect()).collect())
                    .collect()
            })
            .collect();
        let metric0 = g.iter().map(|r| r.iter().map(|q| q.constant_term()).collect()).collect();
        Ok(CurvatureData { point: p.to_vec(), metric: metric0, christoffel, riemann })
    }

    pub fn dim(&self) -> usize {
        self.metric.len()
    }

    /// `Rm(u, v)w`.
    pub fn rm(&self, u: &[f64], v: &[f64], w: &[f64]) -> Vec<f64> {
        let m = self.dim();
        (0..m)
            .map(|d| {
                let mut s = 0.0;
                for a in 0..m {
                    for b in 0..m {
                        for c in 0..m {
                            s += self.riemann[d][a][b][c] * u[a] * v[b] * w[c];
                        }
                    }
                }
                s
            })
            .collect()
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let m = self.dim();
        (0..m).map(|a| (0..m).map(|b| u[a] * self.metric[a][b] * v[b]).sum::<f64>()).sum()
    }

    /// `v ↦ Rm(v, x)x` as a coordinate matrix (column `a` is the image of `∂a`).
    pub fn jacobi_coordinate_matrix(&self, x: &[f64]) -> Matrix<f64> {
        let m = self.dim();
        (0..m)
            .map(|d| {
                (0..m)
                    .map(|a| {
                        let mut s = 0.0;
                        for b in 0..m {
                            for c in 0..m {
                                s += self.riemann[d][a][b][c] * x[b] * x[c];
                            }
                        }
                        s
                    })
                    .collect()
            })
            .collect()
    }

    /// Residuals of antisymmetry, first Bianchi, and pair symmetry on the
    /// coordinate basis, relative to the largest curvature component (or 1).
    pub fn residuals(&self) -> CurvatureResiduals {
        let m = self.dim();
        let e = |i: usize| {
            let mut v = vec![0.0; m];
            v[i] = 1.0;
            v
        };
        let scale = self
            .riemann
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .fold(1.0f64, |acc, v| acc.max(v.abs()));
        let (mut anti, mut bianchi, mut pair) = (0.0f64, 0.0f64, 0.0f64);
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let (u, v, w) = (e(a), e(b), e(c));
                    let r1 = self.rm(&u, &v, &w);
                    let r2 = self.rm(&v, &u, &w);
                    let r3 = self.rm(&v, &w, &u);
                    let r4 = self.rm(&w, &u, &v);
                    for d in 0..m {
                        anti = anti.max((r1[d] + r2[d]).abs());
                        bianchi = bianchi.max((r1[d] + r3[d] + r4[d]).abs());
                    }
                    for d in 0..m {
                        let z = e(d);
                        let lhs = self.inner(&r1, &z);
                        let rhs = self.inner(&self.rm(&w, &z, &u), &v);
                        pair = pair.max((lhs - rhs).abs());
                    }
                }
            }
        }
        CurvatureResiduals { antisymmetry: anti / scale, bianchi: bianchi / scale, pair_symmetry: pair / scale }
    }
}

/// `Γ^c_{ab}(p)`.
pub fn christoffel(metric: &MetricField, p: &[f64]) -> Result<Vec<Matrix<f64>>> {
    Ok(CurvatureData::at(metric, p)?.christoffel)
}

/// Symmetric square root of an SPD matrix and its inverse.
pub fn orthonormal_frame(g: &Matrix<f64>) -> (Matrix<f64>, Matrix<f64>) {
    let m = g.len();
    let a = DMatrix::from_fn(m, m, |i, j| 0.5 * (g[i][j] + g[j][i]));
    let (w, q) = crate::algebra::symmetric_eigen(&a);
    let build = |f: &dyn Fn(f64) -> f64| -> Matrix<f64> {
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| (0..m).map(|k| q[(i, k)] * f(w[k]) * q[(j, k)]).sum())
                    .collect()
            })
            .collect()
    };
    (build(&|l: f64| l.sqrt()), build(&|l: f64| 1.0 / l.sqrt()))
}

pub(crate) fn mat_mul(a: &Matrix<f64>, b: &Matrix<f64>) -> Matrix<f64> {
    let n = a.len();
    let p = b[0].len();
    (0..n)
        .map(|i| (0..p).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub(crate) fn mat_vec(a: &Matrix<f64>, v: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// `R²_x` at `p`, in the `g(p)`-orthonormal frame `F = g(p)^{1/2}`; the
/// direction is taken in chart coordinates.
pub fn curvature_operator(metric: &MetricField, p: &[f64], x: &[f64]) -> Result<Matrix<f64>> {
    let data = CurvatureData::at(metric, p)?;
    let (f, finv) = orthonormal_frame(&data.metric);
    Ok(mat_mul(&mat_mul(&f, &data.jacobi_coordinate_matrix(x)), &finv))
}
