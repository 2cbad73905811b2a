//! Independent numerical solution of
//! `y'' + 2 beta y' + omega0^2 y - 2 gamma^2/(gamma t + 1)^2 y = 0`
//! (free damping when `gamma` is absent).
//!
//! Nothing here touches the closed-form modes. The adaptive path is the
//! Dormand-Prince 5(4) pair with mixed absolute/relative error control and
//! quintic Hermite dense output; a classical fixed-step RK4 path exists for
//! order checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{DampingParams, RiccatiParam};

/// Default tolerances for acceptance comparisons.
pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_ABS_TOL: f64 = 1e-12;

const MAX_STEPS: usize = 1_000_000;

/// Coefficients of the integrated equation. Unlike [`DampingParams`] these
/// are unchecked, so negative `beta` (flutter) can be explored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Oscillator {
    pub beta: f64,
    pub omega0_sq: f64,
    pub gamma: Option<f64>,
}

impl Oscillator {
    pub fn new(params: &DampingParams, riccati: Option<&RiccatiParam>) -> Self {
        Self {
            beta: params.beta(),
            omega0_sq: params.omega0_sq(),
            gamma: riccati.map(RiccatiParam::gamma),
        }
    }

    fn t_star(&self) -> Option<f64> {
        self.gamma.map(|g| -1.0 / g)
    }

    fn rhs(&self, t: f64, y: [f64; 2]) -> [f64; 2] {
        let stiffness = match self.gamma {
            Some(g) => {
                let h = g / (g * t + 1.0);
                self.omega0_sq - 2.0 * h * h
            }
            None => self.omega0_sq,
        };
        [y[1], -2.0 * self.beta * y[1] - stiffness * y[0]]
    }

    /// Third derivative of the solution through `(t, y)`, obtained by
    /// differentiating the equation once; `f` is `rhs(t, y)`.
    fn jerk(&self, t: f64, y: [f64; 2], f: [f64; 2]) -> f64 {
        let (stiffness, stiffness_rate) = match self.gamma {
            Some(g) => {
                let h = g / (g * t + 1.0);
                (self.omega0_sq - 2.0 * h * h, 4.0 * h * h * h)
            }
            None => (self.omega0_sq, 0.0),
        };
        -2.0 * self.beta * f[1] - stiffness * y[1] - stiffness_rate * y[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ivp {
    pub oscillator: Oscillator,
    pub t0: f64,
    pub y0: f64,
    pub dy0: f64,
    /// May precede `t0` for backward integration.
    pub t_end: f64,
}

impl Ivp {
    pub fn new(
        params: &DampingParams,
        riccati: Option<&RiccatiParam>,
        t0: f64,
        y0: f64,
        dy0: f64,
        t_end: f64,
    ) -> Self {
        Self {
            oscillator: Oscillator::new(params, riccati),
            t0,
            y0,
            dy0,
            t_end,
        }
    }

    fn lo_hi(&self) -> (f64, f64) {
        (self.t0.min(self.t_end), self.t0.max(self.t_end))
    }

    fn check_interval(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter("non-finite interval".into()));
        }
        if let Some(ts) = self.oscillator.t_star() {
            let (lo, hi) = self.lo_hi();
            let guard = crate::params::GUARD_REL * ts.abs().max(1.0);
            if ts >= lo - guard && ts <= hi + guard {
                return Err(Error::SingularInterval {
                    t0: self.t0,
                    t_end: self.t_end,
                    t_star: ts,
                });
            }
        }
        Ok(())
    }

    fn check_grid(&self, grid: &[f64]) -> Result<()> {
        let (lo, hi) = self.lo_hi();
        if grid.iter().any(|&t| !(lo..=hi).contains(&t)) {
            return Err(Error::InvalidParameter(format!(
                "grid must lie inside [{lo}, {hi}]"
            )));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("grid must be strictly increasing".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    /// Largest scaled local error estimate among accepted steps.
    pub max_error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub ts: Vec<f64>,
    pub ys: Vec<f64>,
    pub dys: Vec<f64>,
    pub stats: Stats,
}

/// Accepted step endpoint: time, state and derivative of the state.
#[derive(Debug, Clone, Copy)]
struct Node {
    t: f64,
    y: [f64; 2],
    f: [f64; 2],
    jerk: f64,
}

impl Node {
    fn new(osc: &Oscillator, t: f64, y: [f64; 2], f: [f64; 2]) -> Self {
        Node { t, y, f, jerk: osc.jerk(t, y, f) }
    }
}

/// Quintic Hermite interpolation of both state components, each matched in
/// value, first and second derivative at the two nodes.
fn hermite(a: &Node, b: &Node, t: f64) -> [f64; 2] {
    let h = b.t - a.t;
    let s = (t - a.t) / h;
    let (s2, s3) = (s * s, s * s * s);
    let (s4, s5) = (s3 * s, s3 * s2);
    let w = [
        1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
        h * (s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5),
        h * h * 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5),
        10.0 * s3 - 15.0 * s4 + 6.0 * s5,
        h * (-4.0 * s3 + 7.0 * s4 - 3.0 * s5),
        h * h * 0.5 * (s3 - 2.0 * s4 + s5),
    ];
    let combine = |ja: [f64; 3], jb: [f64; 3]| {
        w[0] * ja[0] + w[1] * ja[1] + w[2] * ja[2] + w[3] * jb[0] + w[4] * jb[1] + w[5] * jb[2]
    };
    [
        combine([a.y[0], a.f[0], a.f[1]], [b.y[0], b.f[0], b.f[1]]),
        combine([a.y[1], a.f[1], a.jerk], [b.y[1], b.f[1], b.jerk]),
    ]
}

/// Samples the piecewise Hermite interpolant through `nodes` on `grid`.
fn sample(nodes: &[Node], grid: &[f64], stats: Stats) -> Trajectory {
    let mut sorted: Vec<Node> = nodes.to_vec();
    if sorted.len() > 1 && sorted[0].t > sorted[1].t {
        sorted.reverse();
    }
    let mut ys = Vec::with_capacity(grid.len());
    let mut dys = Vec::with_capacity(grid.len());
    let mut k = 0;
    for &t in grid {
        while k + 2 < sorted.len() && sorted[k + 1].t < t {
            k += 1;
        }
        let y = if sorted.len() == 1 {
            sorted[0].y
        } else if t == sorted[k].t {
            sorted[k].y
        } else if t == sorted[k + 1].t {
            sorted[k + 1].y
        } else {
            hermite(&sorted[k], &sorted[k + 1], t)
        };
        ys.push(y[0]);
        dys.push(y[1]);
    }
    Trajectory {
        ts: grid.to_vec(),
        ys,
        dys,
        stats,
    }
}

// Dormand-Prince 5(4) tableau.
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
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct StepResult {
    y: [f64; 2],
    f: [f64; 2],
    err: [f64; 2],
}

fn dopri_step(osc: &Oscillator, t: f64, y: [f64; 2], f0: [f64; 2], h: f64) -> StepResult {
    let mut k = [[0.0; 2]; 7];
    k[0] = f0;
    for s in 1..7 {
        let mut ys = y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for i in 0..2 {
                ys[i] += h * A[s][j] * kj[i];
            }
        }
        k[s] = osc.rhs(t + C[s] * h, ys);
    }
    // Stage 7 is evaluated at the fifth-order solution (FSAL).
    let mut y_new = y;
    for (j, kj) in k.iter().enumerate().take(6) {
        for i in 0..2 {
            y_new[i] += h * A[6][j] * kj[i];
        }
    }
    let mut err = [0.0; 2];
    for (j, kj) in k.iter().enumerate() {
        for i in 0..2 {
            err[i] += h * E[j] * kj[i];
        }
    }
    StepResult {
        y: y_new,
        f: k[6],
        err,
    }
}

fn error_norm(err: &[f64; 2], y0: &[f64; 2], y1: &[f64; 2], rel: f64, abs: f64) -> f64 {
    let sum: f64 = (0..2)
        .map(|i| {
            let sc = abs + rel * y0[i].abs().max(y1[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (sum / 2.0).sqrt()
}

/// Adaptive integration sampled on `grid` (strictly increasing, inside the interval).
pub fn integrate(ivp: &Ivp, rel_tol: f64, abs_tol: f64, grid: &[f64]) -> Result<Trajectory> {
    if !(rel_tol > 0.0 && abs_tol > 0.0) {
        return Err(Error::InvalidParameter("tolerances must be positive".into()));
    }
    ivp.check_interval()?;
    ivp.check_grid(grid)?;
    let osc = &ivp.oscillator;
    let span = ivp.t_end - ivp.t0;
    let dir = if span < 0.0 { -1.0 } else { 1.0 };
    let mut t = ivp.t0;
    let mut y = [ivp.y0, ivp.dy0];
    let mut f = osc.rhs(t, y);
    let mut stats = Stats {
        rhs_evals: 1,
        ..Stats::default()
    };
    let mut nodes = vec![Node::new(osc, t, y, f)];
    if span == 0.0 {
        return Ok(sample(&nodes, grid, stats));
    }

    let mut h = dir * initial_step(osc, t, y, f, rel_tol, abs_tol, span.abs());
    stats.rhs_evals += 1;
    let mut last_rejected = false;
    while (ivp.t_end - t) * dir > 0.0 {
        if stats.accepted + stats.rejected >= MAX_STEPS {
            return Err(Error::StepFailure { t, h });
        }
        let remaining = ivp.t_end - t;
        let finishing = h.abs() >= remaining.abs();
        if finishing {
            h = remaining;
        }
        if h.abs() <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::StepFailure { t, h });
        }
        let step = dopri_step(osc, t, y, f, h);
        stats.rhs_evals += 6;
        let err = error_norm(&step.err, &y, &step.y, rel_tol, abs_tol);
        if !err.is_finite() {
            stats.rejected += 1;
            h *= 0.2;
            last_rejected = true;
            continue;
        }
        if err <= 1.0 {
            t = if finishing { ivp.t_end } else { t + h };
            y = step.y;
            f = step.f;
            nodes.push(Node::new(osc, t, y, f));
            stats.accepted += 1;
            stats.max_error_estimate = stats.max_error_estimate.max(err);
            let mut factor = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
            if last_rejected {
                factor = factor.min(1.0);
            }
            h *= factor;
            last_rejected = false;
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            last_rejected = true;
        }
    }
    Ok(sample(&nodes, grid, stats))
}

fn initial_step(osc: &Oscillator, t: f64, y: [f64; 2], f: [f64; 2], rel: f64, abs: f64, span: f64) -> f64 {
    let norm = |v: [f64; 2]| {
        let s: f64 = (0..2)
            .map(|i| (v[i] / (abs + rel * y[i].abs())).powi(2))
            .sum();
        (s / 2.0).sqrt()
    };
    let (d0, d1) = (norm(y), norm(f));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1 = [y[0] + h0 * f[0], y[1] + h0 * f[1]];
    let f1 = osc.rhs(t + h0, y1);
    let d2 = norm([f1[0] - f[0], f1[1] - f[1]]) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

/// Classical RK4 with a uniform step no larger than `step`, sampled on `grid`.
pub fn integrate_fixed(ivp: &Ivp, step: f64, grid: &[f64]) -> Result<Trajectory> {
    if step.is_nan() || step <= 0.0 {
        return Err(Error::InvalidParameter("step must be positive".into()));
    }
    ivp.check_interval()?;
    ivp.check_grid(grid)?;
    let osc = &ivp.oscillator;
    let span = ivp.t_end - ivp.t0;
    let n = (span.abs() / step).ceil().max(1.0) as usize;
    let h = span / n as f64;
    let mut y = [ivp.y0, ivp.dy0];
    let mut nodes = Vec::with_capacity(n + 1);
    nodes.push(Node::new(osc, ivp.t0, y, osc.rhs(ivp.t0, y)));
    for i in 0..n {
        let t = ivp.t0 + i as f64 * h;
        let k1 = nodes[i].f;
        let k2 = osc.rhs(t + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = osc.rhs(t + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = osc.rhs(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for j in 0..2 {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        let t1 = if i + 1 == n { ivp.t_end } else { t + h };
        nodes.push(Node::new(osc, t1, y, osc.rhs(t1, y)));
    }
    let stats = Stats {
        accepted: n,
        rhs_evals: 4 * n + 1,
        ..Stats::default()
    };
    Ok(sample(&nodes, grid, stats))
}

/// Largest difference between runs at `rel_tol` 1e-8 and 1e-11, relative to
/// the largest amplitude of the tighter run (zero for a zero solution).
pub fn self_convergence(ivp: &Ivp, grid: &[f64]) -> Result<f64> {
    let loose = integrate(ivp, 1e-8, 1e-10, grid)?;
    let tight = integrate(ivp, 1e-11, 1e-13, grid)?;
    let scale = tight.ys.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let diff = loose
        .ys
        .iter()
        .zip(&tight.ys)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(if scale == 0.0 { diff } else { diff / scale })
}

/// `n + 1` evenly spaced points from `a` to `b`.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn critical() -> DampingParams {
        DampingParams::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn free_critical_matches_polynomial_decay() {
        let grid = uniform_grid(0.0, 10.0, 200);
        let ivp = Ivp::new(&critical(), None, 0.0, 1.0, 0.0, 10.0);
        let tr = integrate(&ivp, DEFAULT_REL_TOL, DEFAULT_ABS_TOL, &grid).unwrap();
        for (t, y) in tr.ts.iter().zip(&tr.ys) {
            let want = (-t).exp() * (1.0 + t);
            assert!((y - want).abs() <= 1e-8 * want.abs().max(1e-3), "t={t} y={y} want={want}");
        }
        assert_eq!(tr.ts.len(), tr.ys.len());
        assert_eq!(tr.ys.len(), tr.dys.len());
        assert!(tr.stats.accepted > 0);
    }

    #[test]
    fn zero_data_stays_zero() {
        let r = RiccatiParam::new(0.5).unwrap();
        let grid = uniform_grid(0.0, 10.0, 50);
        let ivp = Ivp::new(&critical(), Some(&r), 0.0, 0.0, 0.0, 10.0);
        let tr = integrate(&ivp, 1e-10, 1e-12, &grid).unwrap();
        assert!(tr.ys.iter().chain(&tr.dys).all(|&v| v == 0.0));
        assert_eq!(self_convergence(&ivp, &grid).unwrap(), 0.0);
    }

    #[test]
    fn interval_containing_pole_is_rejected() {
        let r = RiccatiParam::new(0.5).unwrap();
        let ivp = Ivp::new(&critical(), Some(&r), -5.0, 1.0, 0.0, 0.0);
        assert!(matches!(
            integrate(&ivp, 1e-8, 1e-10, &[0.0]),
            Err(Error::SingularInterval { .. })
        ));
        // Either side on its own is fine.
        let left = Ivp::new(&critical(), Some(&r), -5.0, 1.0, 0.0, -2.5);
        assert!(integrate(&left, 1e-8, 1e-10, &[-5.0, -3.0]).is_ok());
    }

    #[test]
    fn rejects_bad_inputs() {
        let ivp = Ivp::new(&critical(), None, 0.0, 1.0, 0.0, 1.0);
        assert!(integrate(&ivp, 0.0, 1e-12, &[0.5]).is_err());
        assert!(integrate(&ivp, 1e-8, 1e-12, &[1.5]).is_err());
        assert!(integrate(&ivp, 1e-8, 1e-12, &[0.5, 0.2]).is_err());
    }

    #[test]
    fn backward_integration_and_flutter() {
        let mut ivp = Ivp::new(&critical(), None, 0.0, 1.0, 0.0, 0.0);
        ivp.oscillator.beta = -0.1;
        ivp.oscillator.omega0_sq = 1.0;
        ivp.t_end = -3.0;
        let tr = integrate(&ivp, 1e-10, 1e-12, &[-3.0, -1.0, 0.0]).unwrap();
        assert_eq!(tr.ys[2], 1.0);
        // beta < 0 forward in time grows; backward in time decays.
        assert!(tr.ys[0].abs() < 1.0);
    }
}
