//! Dormand–Prince 5(4) with adaptive steps.

#[derive(Clone, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-11, atol: 1e-12, max_steps: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OdeStop {
    /// reached the final time
    Done,
    /// the acceptance predicate rejected a state; integration stopped at the
    /// last accepted one
    Rejected,
    /// step count or step size limit
    Failed,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction), updating
/// `y` in place. `accept` is called on every accepted state; returning false
/// stops the integration there. Returns the reached time.
pub fn integrate<F, P>(f: F, t0: f64, y: &mut Vec<f64>, t1: f64, opts: &OdeOptions, mut accept: P) -> (f64, OdeStop)
where
    F: Fn(f64, &[f64], &mut [f64]),
    P: FnMut(f64, &[f64]) -> bool,
{
    let n = y.len();
    let span = t1 - t0;
    if span == 0.0 {
        return (t0, OdeStop::Done);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut h = dir * (span.abs() / 16.0).min(0.05);
    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut y5 = vec![0.0; n];
    f(t, y, &mut k[0]);
    let mut steps = 0;
    while (t1 - t) * dir > 0.0 {
        if steps >= opts.max_steps || h.abs() < 1e-14 * span.abs().max(1.0) {
            return (t, OdeStop::Failed);
        }
        steps += 1;
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += h * A[s][j] * kj[i];
                }
                tmp[i] = acc;
            }
            f(t + C[s] * h, &tmp, &mut k[s]);
        }
        let mut err = 0.0f64;
        for i in 0..n {
            let mut hi = y[i];
            let mut lo = y[i];
            for s in 0..7 {
                hi += h * B5[s] * k[s][i];
                lo += h * B4[s] * k[s][i];
            }
            y5[i] = hi;
            let sc = opts.atol + opts.rtol * y[i].abs().max(hi.abs());
            err = err.max(((hi - lo) / sc).abs());
        }
        if !err.is_finite() {
            h *= 0.25;
            continue;
        }
        if err <= 1.0 {
            let t_new = if (t1 - (t + h)) * dir <= 0.0 { t1 } else { t + h };
            if !accept(t_new, &y5) {
                return (t, OdeStop::Rejected);
            }
            t = t_new;
            y.copy_from_slice(&y5);
            // first-same-as-last
            let last = k[6].clone();
            k[0] = last;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    (t, OdeStop::Done)
}
