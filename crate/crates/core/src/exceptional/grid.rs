//! Quasi-uniform unit-sphere grids.

use std::collections::HashMap;
use std::f64::consts::PI;

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// Icosahedron subdivided `level` times: `10·4^level + 2` points.
pub fn icosphere(level: usize) -> Vec<Vec<f64>> {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts: Vec<Vec<f64>> = vec![
        vec![-1.0, t, 0.0],
        vec![1.0, t, 0.0],
        vec![-1.0, -t, 0.0],
        vec![1.0, -t, 0.0],
        vec![0.0, -1.0, t],
        vec![0.0, 1.0, t],
        vec![0.0, -1.0, -t],
        vec![0.0, 1.0, -t],
        vec![t, 0.0, -1.0],
        vec![t, 0.0, 1.0],
        vec![-t, 0.0, -1.0],
        vec![-t, 0.0, 1.0],
    ];
    pts.iter_mut().for_each(|p| normalize(p));
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut midpoint = |a: usize, b: usize, pts: &mut Vec<Vec<f64>>| -> usize {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let mut p: Vec<f64> = pts[a].iter().zip(&pts[b]).map(|(x, y)| x + y).collect();
                normalize(&mut p);
                pts.push(p);
                pts.len() - 1
            })
        };
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut pts);
            let bc = midpoint(b, c, &mut pts);
            let ca = midpoint(c, a, &mut pts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    pts
}

/// Hyperspherical product grid on `S^{m-1}`: `n` midpoint angles per polar
/// coordinate and `2n` for the azimuth.
pub fn product_sphere(m: usize, n: usize) -> Vec<Vec<f64>> {
    let polar: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * PI / n as f64).collect();
    let azimuth: Vec<f64> = (0..2 * n).map(|i| (i as f64 + 0.5) * PI / n as f64).collect();
    let mut angles: Vec<Vec<f64>> = vec![vec![]];
    for d in 0..m - 1 {
        let choices = if d + 2 == m { &azimuth } else { &polar };
        angles = angles
            .into_iter()
            .flat_map(|a| {
                choices.iter().map(move |c| {
                    let mut b = a.clone();
                    b.push(*c);
                    b
                })
            })
            .collect();
    }
    angles
        .iter()
        .map(|a| {
            let mut x = vec![0.0; m];
            let mut s = 1.0;
            for (i, th) in a.iter().enumerate() {
                x[i] = s * th.cos();
                s *= th.sin();
            }
            x[m - 1] = s;
            x
        })
        .collect()
}

/// At least `count` unit vectors in `R^m`.
pub fn sphere_grid(m: usize, count: usize) -> Vec<Vec<f64>> {
    match m {
        1 => vec![vec![1.0]],
        2 => (0..count.max(1)).map(|i| {
            let t = 2.0 * PI * i as f64 / count.max(1) as f64;
            vec![t.cos(), t.sin()]
        })
        .collect(),
        3 => {
            let mut level = 0;
            while 10 * 4usize.pow(level as u32) + 2 < count {
                level += 1;
            }
            icosphere(level)
        }
        _ => {
            let mut n: usize = 1;
            while 2 * n.pow(m as u32 - 1) < count {
                n += 1;
            }
            product_sphere(m, n)
        }
    }
}
