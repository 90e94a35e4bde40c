use crate::error::{Error, Result};
use crate::model::signal::VOLATILITY_FLOOR;

/// Piecewise-linear volatility `eta(t)` on a time grid, with its clock
/// `alpha(t) = ∫_0^t eta(s)^2 ds` precomputed at the nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct VolatilityCurve {
    times: Vec<f64>,
    values: Vec<f64>,
    alpha: Vec<f64>,
}

/// `∫_0^s (a + m u)^2 du`.
#[inline]
fn segment_integral(a: f64, m: f64, s: f64) -> f64 {
    s * (a * a + a * m * s + m * m * s * s / 3.0)
}

impl VolatilityCurve {
    /// Values below the volatility floor are raised to it.
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times.len() != values.len() {
            return Err(Error::GridMismatch(format!(
                "volatility curve needs matching grids of length >= 2, got {} and {}",
                times.len(),
                values.len()
            )));
        }
        if times[0] != 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("volatility grid must start at 0 and increase".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("volatility values must be finite".into()));
        }
        let values: Vec<f64> = values.into_iter().map(|v| v.max(VOLATILITY_FLOOR)).collect();
        let mut alpha = Vec::with_capacity(times.len());
        alpha.push(0.0);
        for k in 0..times.len() - 1 {
            let h = times[k + 1] - times[k];
            let (a, b) = (values[k], values[k + 1]);
            alpha.push(alpha[k] + h * (a * a + a * b + b * b) / 3.0);
        }
        Ok(VolatilityCurve { times, values, alpha })
    }

    pub fn constant(value: f64, horizon: f64, n_intervals: usize) -> Result<Self> {
        let times = crate::model::measure::uniform_grid(horizon, n_intervals);
        let values = vec![value; times.len()];
        Self::new(times, values)
    }

    pub fn from_fn(horizon: f64, n_intervals: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let times = crate::model::measure::uniform_grid(horizon, n_intervals);
        let values = times.iter().map(|&t| f(t)).collect();
        Self::new(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn total_clock(&self) -> f64 {
        *self.alpha.last().unwrap()
    }

    fn segment(&self, t: f64) -> usize {
        self.times
            .partition_point(|&s| s <= t)
            .saturating_sub(1)
            .min(self.times.len() - 2)
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.horizon()).contains(&t) {
            return Err(Error::Domain(format!("t = {t} outside [0, {}]", self.horizon())));
        }
        Ok(())
    }

    /// Linear interpolation of `eta`; clamped to the end values outside the grid.
    pub fn eta(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.values[0];
        }
        if t >= self.horizon() {
            return *self.values.last().unwrap();
        }
        let k = self.segment(t);
        let w = (t - self.times[k]) / (self.times[k + 1] - self.times[k]);
        self.values[k] + w * (self.values[k + 1] - self.values[k])
    }

    /// `alpha(t)`; exact for the piecewise-linear `eta`.
    pub fn clock(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.clock_unchecked(t))
    }

    pub(crate) fn clock_unchecked(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= self.horizon() {
            return self.total_clock();
        }
        let k = self.segment(t);
        let h = self.times[k + 1] - self.times[k];
        let m = (self.values[k + 1] - self.values[k]) / h;
        self.alpha[k] + segment_integral(self.values[k], m, t - self.times[k])
    }

    /// `zeta(u) = alpha^{-1}(u)` by bisection inside the bracketing segment.
    pub fn inverse_clock(&self, u: f64) -> Result<f64> {
        let total = self.total_clock();
        if !(u >= 0.0 && u <= total * (1.0 + 1e-14)) {
            return Err(Error::Domain(format!("u = {u} outside [0, alpha(T) = {total}]")));
        }
        if u >= total {
            return Ok(self.horizon());
        }
        let k = self
            .alpha
            .partition_point(|&a| a <= u)
            .saturating_sub(1)
            .min(self.times.len() - 2);
        let h = self.times[k + 1] - self.times[k];
        let m = (self.values[k + 1] - self.values[k]) / h;
        let target = u - self.alpha[k];
        let (mut lo, mut hi) = (0.0, h);
        while hi - lo > 1e-13 * (1.0 + self.times[k + 1]) {
            let mid = 0.5 * (lo + hi);
            if segment_integral(self.values[k], m, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(self.times[k] + 0.5 * (lo + hi))
    }

    /// Curve with every value shifted by `delta` (then floored).
    pub fn shifted(&self, delta: f64) -> Result<Self> {
        Self::new(self.times.clone(), self.values.iter().map(|v| v + delta).collect())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Free-function form of [`VolatilityCurve::clock`].
pub fn clock(eta: &VolatilityCurve, t: f64) -> Result<f64> {
    eta.clock(t)
}

/// Free-function form of [`VolatilityCurve::inverse_clock`].
pub fn inverse_clock(eta: &VolatilityCurve, u: f64) -> Result<f64> {
    eta.inverse_clock(u)
}
