//! Classical convex hulls of small flat clouds in dimension 2 and 3, by
//! enumerating simplices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::hull::Net;

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn segment_distance(y: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let d = sub(b, a);
    let dd = dot(&d, &d);
    let t = if dd > 0.0 { (dot(&sub(y, a), &d) / dd).clamp(0.0, 1.0) } else { 0.0 };
    let q: Vec<f64> = a.iter().zip(&d).map(|(x, e)| x + t * e).collect();
    norm(&sub(y, &q))
}

/// Barycentric coordinates of `y` in the affine span of `s` (least squares),
/// together with the residual distance to that span.
fn barycentric(y: &[f64], s: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let k = s.len() - 1;
    let e: Vec<Vec<f64>> = (1..=k).map(|i| sub(s[i], s[0])).collect();
    let r = sub(y, s[0]);
    let mut gram = nalgebra::DMatrix::zeros(k, k);
    let mut rhs = nalgebra::DVector::zeros(k);
    for i in 0..k {
        rhs[i] = dot(&e[i], &r);
        for j in 0..k {
            gram[(i, j)] = dot(&e[i], &e[j]);
        }
    }
    let c = gram.lu().solve(&rhs)?;
    let mut q = s[0].to_vec();
    for i in 0..k {
        for (qq, ee) in q.iter_mut().zip(&e[i]) {
            *qq += c[i] * ee;
        }
    }
    let mut lam = vec![1.0 - c.sum()];
    lam.extend(c.iter());
    Some((lam, norm(&sub(y, &q))))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Distance from `y` to a simplex with at most three vertices.
fn simplex_distance(y: &[f64], s: &[&[f64]]) -> f64 {
    match s.len() {
        1 => norm(&sub(y, s[0])),
        2 => segment_distance(y, s[0], s[1]),
        _ => {
            let edges = (0..s.len()).flat_map(|i| ((i + 1)..s.len()).map(move |j| (i, j)));
            let on_edges = edges.map(|(i, j)| segment_distance(y, s[i], s[j])).fold(f64::INFINITY, f64::min);
            match barycentric(y, s) {
                Some((lam, d)) if lam.iter().all(|l| *l >= 0.0) => d.min(on_edges),
                _ => on_edges,
            }
        }
    }
}

/// Euclidean distance from `y` to the convex hull of `points` (m = 2, 3).
pub fn hull_distance(points: &[Vec<f64>], y: &[f64]) -> f64 {
    let m = y.len();
    assert!((2..=3).contains(&m), "flat hull oracle supports m = 2, 3");
    let n = points.len();
    // inside some full simplex
    for s in subsets(n, m + 1) {
        let verts: Vec<&[f64]> = s.iter().map(|&i| points[i].as_slice()).collect();
        if let Some((lam, d)) = barycentric(y, &verts) {
            if d < 1e-12 && lam.iter().all(|l| *l >= -1e-12) {
                return 0.0;
            }
        }
    }
    // otherwise the nearest hull point lies on a boundary face spanned by m vertices
    let mut best = f64::INFINITY;
    for k in 1..=m.min(n) {
        for s in subsets(n, k) {
            let verts: Vec<&[f64]> = s.iter().map(|&i| points[i].as_slice()).collect();
            best = best.min(simplex_distance(y, &verts));
        }
    }
    best
}

/// Symmetric comparison of a net with the hull of `points`:
/// `(max over net of distance to hull, max over sampled hull points of distance to net)`.
pub fn hull_agreement(points: &[Vec<f64>], net: &Net, samples: usize, seed: u64) -> (f64, f64) {
    let m = points[0].len();
    let out = net.points().iter().map(|p| hull_distance(points, p)).fold(0.0, f64::max);
    let lo: Vec<f64> = (0..m).map(|i| points.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..m).map(|i| points.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes: Vec<Vec<f64>> = points.to_vec();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            for s in 1..8 {
                let t = s as f64 / 8.0;
                probes.push(points[i].iter().zip(&points[j]).map(|(a, b)| a + t * (b - a)).collect());
            }
        }
    }
    let mut tries = 0;
    while probes.len() < points.len() + samples && tries < 200 * samples {
        tries += 1;
        let y: Vec<f64> = (0..m).map(|i| rng.gen_range(lo[i]..=hi[i])).collect();
        if hull_distance(points, &y) == 0.0 {
            probes.push(y);
        }
    }
    let inside = probes.iter().map(|y| net.distance(y)).fold(0.0, f64::max);
    (out, inside)
}
