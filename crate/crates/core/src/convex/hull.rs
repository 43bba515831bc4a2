//! Hull iteration: repeatedly add minimizing geodesics between cloud points.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec;
use crate::geodesic::{minimizing_geodesic, MinimizeOptions};
use crate::manifold::MetricField;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Greedy covering net in chart coordinates: a point is kept unless a kept
/// point lies within `h`. Lookups go through a hash grid of cell size `h`.
#[derive(Clone, Debug)]
pub struct Net {
    h: f64,
    points: Vec<Vec<f64>>,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl Net {
    pub fn new(h: f64) -> Self {
        Net { h, points: Vec::new(), cells: HashMap::new() }
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    fn cell(&self, p: &[f64]) -> Vec<i64> {
        p.iter().map(|x| (x / self.h).floor() as i64).collect()
    }

    fn neighbours(&self, cell: &[i64], reach: i64) -> Vec<usize> {
        let m = cell.len();
        let width = (2 * reach + 1) as usize;
        let mut out = Vec::new();
        for idx in 0..width.pow(m as u32) {
            let mut rem = idx;
            let key: Vec<i64> = cell
                .iter()
                .map(|c| {
                    let off = (rem % width) as i64 - reach;
                    rem /= width;
                    c + off
                })
                .collect();
            if let Some(list) = self.cells.get(&key) {
                out.extend_from_slice(list);
            }
        }
        out
    }

    /// Distance to the nearest kept point within `h`, if any.
    fn near(&self, p: &[f64]) -> Option<f64> {
        let cell = self.cell(p);
        self.neighbours(&cell, 1).iter().map(|&i| dist(&self.points[i], p)).filter(|d| *d <= self.h).reduce(f64::min)
    }

    /// Keeps `p` if no kept point is within `h`; returns whether it was kept.
    pub fn insert(&mut self, p: Vec<f64>) -> bool {
        if self.near(&p).is_some() {
            return false;
        }
        let cell = self.cell(&p);
        self.cells.entry(cell).or_default().push(self.points.len());
        self.points.push(p);
        true
    }

    /// Chart distance from `p` to the nearest net point.
    pub fn distance(&self, p: &[f64]) -> f64 {
        if self.points.is_empty() {
            return f64::INFINITY;
        }
        let cell = self.cell(p);
        let mut reach = 1;
        loop {
            let best = self.neighbours(&cell, reach).iter().map(|&i| dist(&self.points[i], p)).reduce(f64::min);
            // a hit within `reach·h` is exact: anything closer lies in the searched cells
            if let Some(d) = best {
                if d <= reach as f64 * self.h {
                    return d;
                }
            }
            if reach >= 4 {
                return self.points.iter().map(|q| dist(q, p)).fold(f64::INFINITY, f64::min);
            }
            reach += 1;
        }
    }
}

/// Directed Hausdorff distance `max_{a ∈ from} d(a, to)`.
pub fn directed_hausdorff(from: &[Vec<f64>], to: &Net) -> f64 {
    from.iter().map(|a| to.distance(a)).fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct HullOptions {
    /// net resolution in chart units
    pub h: f64,
    /// geodesic pairs per round; all pairs when there are fewer
    pub density: usize,
    pub seed: u64,
}

impl Default for HullOptions {
    fn default() -> Self {
        HullOptions { h: 0.02, density: 2000, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct HullRound {
    pub cloud: Vec<Vec<f64>>,
    /// `max_{q ∈ Q_{i+1}} d(q, Q_i)`
    pub gap: f64,
    pub pairs: usize,
    /// pairs with several minimizing geodesics (all branches were added)
    pub ambiguous: usize,
    /// pairs for which no geodesic was found
    pub failed: usize,
}

#[derive(Clone, Debug)]
pub struct HullReport {
    pub h: f64,
    pub initial: Vec<Vec<f64>>,
    pub rounds: Vec<HullRound>,
}

impl HullReport {
    pub fn final_cloud(&self) -> &[Vec<f64>] {
        self.rounds.last().map(|r| r.cloud.as_slice()).unwrap_or(&self.initial)
    }

    pub fn final_net(&self) -> Net {
        let mut net = Net::new(self.h);
        for p in self.final_cloud() {
            net.insert(p.clone());
        }
        net
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.rounds.iter().map(|r| r.gap).collect()
    }
}

fn pairs_for_round(n: usize, density: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let total = n * n.saturating_sub(1) / 2;
    if total <= density {
        let mut out = Vec::with_capacity(total);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push((i, j));
            }
        }
        return out;
    }
    (0..density)
        .map(|_| {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            (i.min(j), i.max(j))
        })
        .collect()
}

/// `Q_{i+1}` = net of `Q_i` plus points sampled every `h/2` along minimizing
/// geodesics between (subsampled) pairs of `Q_i`.
pub fn hull_iterate(metric: &Arc<MetricField>, q: &[Vec<f64>], rounds: usize, opts: &HullOptions) -> Result<HullReport> {
    if q.is_empty() {
        return Err(Error::InvalidParameter("empty point cloud".into()));
    }
    if !(opts.h > 0.0) {
        return Err(Error::InvalidParameter("net resolution must be positive".into()));
    }
    for p in q {
        if p.len() != metric.dim() || !metric.domain().contains(p) {
            return Err(Error::OutsideDomain(p.clone()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut current = Net::new(opts.h);
    for p in q {
        current.insert(p.clone());
    }
    let mut report = HullReport { h: opts.h, initial: q.to_vec(), rounds: Vec::new() };
    for _ in 0..rounds {
        let pts = current.points().to_vec();
        let pairs = pairs_for_round(pts.len(), opts.density, &mut rng);
        let results: Vec<Result<(Vec<Vec<f64>>, bool)>> = exec::map(&pairs, |&(i, j)| {
            let chart = dist(&pts[i], &pts[j]);
            let steps = ((2.0 * chart / opts.h).ceil() as usize).max(8);
            let mo = MinimizeOptions { steps, ..MinimizeOptions::default() };
            let mins = minimizing_geodesic(metric, &pts[i], &pts[j], &mo)?;
            let mut out = Vec::new();
            for (path, len) in mins.paths.iter().zip(&mins.lengths) {
                if mins.ambiguous || *len <= mins.lengths[0] * (1.0 + mo.tie) {
                    out.extend(path.positions.iter().cloned());
                }
                if !mins.ambiguous {
                    break;
                }
            }
            Ok((out, mins.ambiguous))
        });
        let mut next = current.clone();
        let (mut ambiguous, mut failed) = (0, 0);
        for r in results {
            match r {
                Ok((samples, amb)) => {
                    ambiguous += amb as usize;
                    for s in samples {
                        next.insert(s);
                    }
                }
                Err(_) => failed += 1,
            }
        }
        let gap = directed_hausdorff(next.points(), &current);
        report.rounds.push(HullRound { cloud: next.points().to_vec(), gap, pairs: pairs.len(), ambiguous, failed });
        current = next;
    }
    Ok(report)
}
