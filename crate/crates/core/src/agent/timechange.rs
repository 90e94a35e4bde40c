//! The stopping problem in clock time `u = alpha(t)` and log-likelihood
//! coordinates `l = logit(pi)`, where the belief diffusion has unit volatility.

use super::lcp::{obstacle_step, StepWork};
use super::obstacle::check_inputs;
use super::surface::{locate, ValueSurface};
use crate::error::{Error, Result};
use crate::filtering::{sigmoid, VolatilityCurve};
use crate::model::measure::uniform_grid;
use crate::model::{GridConfig, LossModel};

/// Half-width of the truncated `l` domain.
pub const L_MAX: f64 = 12.0;

/// Drift of `L` under the observer's law in clock time: `S(l) - 1/2`.
#[inline]
pub fn clock_drift(l: f64) -> f64 {
    sigmoid(l) - 0.5
}

/// Value function on a uniform `(u, l)` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ClockSurface {
    pub us: Vec<f64>,
    pub ls: Vec<f64>,
    values: Vec<f64>,
}

impl ClockSurface {
    pub fn row(&self, n: usize) -> &[f64] {
        let w = self.ls.len();
        &self.values[n * w..(n + 1) * w]
    }

    /// Bilinear interpolation at `(u, l)`, clamped to the grid.
    pub fn value_at(&self, u: f64, l: f64) -> f64 {
        let w = self.ls.len();
        let (n, wu) = locate(&self.us, u);
        let (j, wl) = locate(&self.ls, l);
        let v = |n: usize, j: usize| self.values[n * w + j];
        (1.0 - wu) * ((1.0 - wl) * v(n, j) + wl * v(n, j + 1)) + wu * ((1.0 - wl) * v(n + 1, j) + wl * v(n + 1, j + 1))
    }
}

/// Solves `d_u W + a(l) d_l W + W''/2 = -c / eta(zeta(u))^2`, `W <= g(S(l))`,
/// on `[0, alpha(T)] x [-L_MAX, L_MAX]` with `W = g(S(l))` at `l = +-L_MAX`.
/// `n_time` clock steps and `n_space` `l` intervals are taken from `grid`.
pub fn solve_clock_surface(
    eta: &VolatilityCurve,
    loss: &LossModel,
    c: f64,
    horizon: f64,
    grid: &GridConfig,
) -> Result<ClockSurface> {
    check_inputs(eta, loss, c, horizon, grid)?;
    let total = eta.total_clock();
    let us = uniform_grid(total, grid.n_time);
    let ls: Vec<f64> = uniform_grid(2.0 * L_MAX, grid.n_space)
        .iter()
        .map(|x| x - L_MAX)
        .collect();
    let w = ls.len();
    let m = w - 2;
    let h = ls[1] - ls[0];
    let obstacle: Vec<f64> = ls.iter().map(|&l| loss.g(sigmoid(l))).collect();
    let drift: Vec<f64> = ls[1..w - 1].iter().map(|&l| clock_drift(l)).collect();

    let n_u = us.len() - 1;
    let mut values = vec![0.0; us.len() * w];
    values[n_u * w..].copy_from_slice(&obstacle);
    let (mut lower, mut diag, mut upper) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    let mut rhs = vec![0.0; m];
    let mut v = vec![0.0; m];
    let mut work = StepWork::new(m);
    for n in (0..n_u).rev() {
        let du = us[n + 1] - us[n];
        let e = eta.eta(eta.inverse_clock(us[n].min(total))?);
        let source = c / (e * e);
        for j in 0..m {
            let diff = 0.5 * du / (h * h);
            let adv = 0.5 * du * drift[j] / h;
            lower[j] = -(diff - adv);
            upper[j] = -(diff + adv);
            diag[j] = 1.0 + 2.0 * diff;
        }
        let next = &values[(n + 1) * w..(n + 2) * w];
        for j in 0..m {
            rhs[j] = next[j + 1] + du * source;
        }
        rhs[0] -= lower[0] * obstacle[0];
        rhs[m - 1] -= upper[m - 1] * obstacle[w - 1];
        obstacle_step(&lower, &diag, &upper, &rhs, &obstacle[1..w - 1], &mut v, &mut work);
        let row = &mut values[n * w..(n + 1) * w];
        row[0] = obstacle[0];
        row[w - 1] = obstacle[w - 1];
        for j in 0..m {
            if !v[j].is_finite() {
                return Err(Error::NonFinite {
                    time_index: n,
                    space_index: j + 1,
                });
            }
            row[j + 1] = v[j].min(obstacle[j + 1]);
        }
    }
    Ok(ClockSurface { us, ls, values })
}

/// Solves the problem in clock coordinates and maps it back to the uniform
/// `(t, pi)` grid by `V(t, pi) = W(alpha(t), logit(pi))`, clipped to `g`.
pub fn solve_value_timechanged(
    eta: &VolatilityCurve,
    loss: &LossModel,
    c: f64,
    horizon: f64,
    grid: &GridConfig,
) -> Result<ValueSurface> {
    let clock_surface = solve_clock_surface(eta, loss, c, horizon, grid)?;
    let times = uniform_grid(horizon, grid.n_time);
    let pis = uniform_grid(1.0, grid.n_space);
    let w = pis.len();
    let last = times.len() - 1;
    let mut values = vec![0.0; times.len() * w];
    for (k, &t) in times.iter().enumerate() {
        let u = eta.clock_unchecked(t);
        for (i, &p) in pis.iter().enumerate() {
            let g = loss.g(p);
            values[k * w + i] = if k == last || i == 0 || i == w - 1 {
                g
            } else {
                let l = (p / (1.0 - p)).ln();
                if l.abs() >= L_MAX {
                    g
                } else {
                    clock_surface.value_at(u, l).min(g)
                }
            };
        }
    }
    ValueSurface::from_values(times, pis, *loss, values)
}
