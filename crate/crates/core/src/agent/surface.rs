use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::LossModel;

/// Free boundaries `b(t) <= B(t)` on the time grid of a value surface.
///
/// `flagged[k]` marks slices with an empty continuation region, where both
/// boundaries are set to the loss's center.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Boundaries {
    pub times: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub flagged: Vec<bool>,
}

impl Boundaries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Boundaries with a flagged terminal slice replaced by the previous slice,
    /// i.e. the left limit at the horizon. Used when the boundaries drive a
    /// stopping rule.
    pub fn held_at_horizon(&self) -> Boundaries {
        let mut out = self.clone();
        let n = out.len();
        if n >= 2 && out.flagged[n - 1] {
            out.lower[n - 1] = out.lower[n - 2];
            out.upper[n - 1] = out.upper[n - 2];
            out.flagged[n - 1] = out.flagged[n - 2];
        }
        out
    }

    /// Largest `|b - b'|` or `|B - B'|` over the grid.
    pub fn sup_distance(&self, other: &Boundaries) -> Result<f64> {
        if self.times != other.times {
            return Err(Error::GridMismatch("boundaries on different time grids".into()));
        }
        Ok(self
            .lower
            .iter()
            .zip(&other.lower)
            .chain(self.upper.iter().zip(&other.upper))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Estimates `b(T-)` and `B(T-)` by fitting `x(t) = x_T + k sqrt(T - t)` by
    /// least squares to the last `n_fit` unflagged slices before the horizon.
    pub fn terminal_limit(&self, n_fit: usize) -> Option<(f64, f64)> {
        let horizon = *self.times.last()?;
        let idx: Vec<usize> = (0..self.len().saturating_sub(1))
            .rev()
            .filter(|&k| !self.flagged[k])
            .take(n_fit)
            .collect();
        if idx.len() < 2 {
            return None;
        }
        let fit = |ys: &[f64]| {
            let xs: Vec<f64> = idx.iter().map(|&k| (horizon - self.times[k]).sqrt()).collect();
            let ys: Vec<f64> = idx.iter().map(|&k| ys[k]).collect();
            let n = xs.len() as f64;
            let mx = xs.iter().sum::<f64>() / n;
            let my = ys.iter().sum::<f64>() / n;
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
            my - sxy / sxx * mx
        };
        Some((fit(&self.lower), fit(&self.upper)))
    }
}

/// Value function on a uniform `(t, pi)` grid, with the stopping indicator and
/// the extracted boundaries.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueSurface {
    pub times: Vec<f64>,
    pub pis: Vec<f64>,
    pub loss: LossModel,
    values: Vec<f64>,
    stop: Vec<bool>,
    pub boundaries: Boundaries,
}

/// Stop-region threshold for `g - V`.
pub fn default_eps_stop(loss: &LossModel) -> f64 {
    1e-9 * loss.sup_norm().max(1.0)
}

impl ValueSurface {
    /// Builds a surface from row-major values (one row per time node),
    /// deriving the stop indicator and boundaries with the default threshold.
    pub fn from_values(times: Vec<f64>, pis: Vec<f64>, loss: LossModel, values: Vec<f64>) -> Result<Self> {
        if values.len() != times.len() * pis.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}x{} grid",
                values.len(),
                times.len(),
                pis.len()
            )));
        }
        let eps = default_eps_stop(&loss);
        let w = pis.len();
        let stop = values
            .iter()
            .enumerate()
            .map(|(n, &v)| loss.g(pis[n % w]) - v <= eps)
            .collect();
        let mut surface = ValueSurface {
            boundaries: Boundaries {
                times: vec![],
                lower: vec![],
                upper: vec![],
                flagged: vec![],
            },
            times,
            pis,
            loss,
            values,
            stop,
        };
        surface.boundaries = super::boundary::extract_boundaries(&surface, eps);
        Ok(surface)
    }

    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    pub fn n_space(&self) -> usize {
        self.pis.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let w = self.pis.len();
        &self.values[k * w..(k + 1) * w]
    }

    pub fn value(&self, k: usize, i: usize) -> f64 {
        self.values[k * self.pis.len() + i]
    }

    pub fn is_stop(&self, k: usize, i: usize) -> bool {
        self.stop[k * self.pis.len() + i]
    }

    /// Space step of the (uniform) `pi` grid.
    pub fn space_step(&self) -> f64 {
        self.pis[1] - self.pis[0]
    }

    /// Bilinear interpolation of `V` at `(t, pi)` inside the grid.
    pub fn value_at(&self, t: f64, pi: f64) -> f64 {
        let (k, wt) = locate(&self.times, t);
        let (i, wp) = locate(&self.pis, pi);
        let v = |k: usize, i: usize| self.value(k, i);
        (1.0 - wt) * ((1.0 - wp) * v(k, i) + wp * v(k, i + 1)) + wt * ((1.0 - wp) * v(k + 1, i) + wp * v(k + 1, i + 1))
    }

    /// Largest absolute difference of the values at common nodes.
    pub fn sup_distance(&self, other: &ValueSurface) -> Result<f64> {
        if self.times != other.times || self.pis != other.pis {
            return Err(Error::GridMismatch("surfaces on different grids".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Index `k` and weight `w` with `x = (1 - w) grid[k] + w grid[k + 1]`, clamped to the grid.
pub(crate) fn locate(grid: &[f64], x: f64) -> (usize, f64) {
    let n = grid.len();
    if x <= grid[0] {
        return (0, 0.0);
    }
    if x >= grid[n - 1] {
        return (n - 2, 1.0);
    }
    let k = grid.partition_point(|&g| g <= x) - 1;
    let k = k.min(n - 2);
    (k, (x - grid[k]) / (grid[k + 1] - grid[k]))
}
