//! Population measures `mu = (mu^0, mu^1)` stored as CDFs on a shared time grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Conditional laws of the stopping time given `theta = 0` and `theta = 1`,
/// as piecewise-linear CDFs on a uniform grid `0 = t_0 < ... < t_N = T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoppedMeasurePair {
    times: Vec<f64>,
    f0: Vec<f64>,
    f1: Vec<f64>,
}

pub(crate) fn uniform_grid(horizon: f64, n_intervals: usize) -> Vec<f64> {
    (0..=n_intervals)
        .map(|k| {
            if k == n_intervals {
                horizon
            } else {
                horizon * k as f64 / n_intervals as f64
            }
        })
        .collect()
}

fn check_cdf(name: &str, values: &[f64]) -> Result<()> {
    let mut prev = 0.0;
    for (k, &v) in values.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!("{name}[{k}] = {v} outside [0, 1]")));
        }
        if v < prev {
            return Err(Error::Domain(format!("{name} decreases at index {k}")));
        }
        prev = v;
    }
    if values.last() != Some(&1.0) {
        return Err(Error::Domain(format!("{name} must end at exactly 1")));
    }
    Ok(())
}

impl StoppedMeasurePair {
    /// Builds a pair from raw CDF values, clamping to `[0, 1]` and pinning the
    /// terminal value to 1. Monotonicity is required, not repaired.
    pub fn new(times: Vec<f64>, f0: Vec<f64>, f1: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || f0.len() != times.len() || f1.len() != times.len() {
            return Err(Error::GridMismatch(format!(
                "times {}, F0 {}, F1 {}",
                times.len(),
                f0.len(),
                f1.len()
            )));
        }
        if times[0] != 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("time grid must start at 0 and increase".into()));
        }
        let fix = |mut v: Vec<f64>| {
            for x in v.iter_mut() {
                *x = x.clamp(0.0, 1.0);
            }
            *v.last_mut().unwrap() = 1.0;
            v
        };
        let (f0, f1) = (fix(f0), fix(f1));
        check_cdf("F0", &f0)?;
        check_cdf("F1", &f1)?;
        Ok(StoppedMeasurePair { times, f0, f1 })
    }

    pub fn from_fn(horizon: f64, n_intervals: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let times = uniform_grid(horizon, n_intervals);
        let values: Vec<f64> = times.iter().map(|&t| f(t)).collect();
        Self::new(times, values.clone(), values)
    }

    /// `F(t) = t / T` for both states.
    pub fn uniform(horizon: f64, n_intervals: usize) -> Result<Self> {
        Self::from_fn(horizon, n_intervals, |t| t / horizon)
    }

    /// Everyone stops at time 0.
    pub fn mass_at_zero(horizon: f64, n_intervals: usize) -> Result<Self> {
        Self::from_fn(horizon, n_intervals, |_| 1.0)
    }

    /// Nobody stops before the horizon.
    pub fn mass_at_horizon(horizon: f64, n_intervals: usize) -> Result<Self> {
        let times = uniform_grid(horizon, n_intervals);
        let mut values = vec![0.0; times.len()];
        *values.last_mut().unwrap() = 1.0;
        Self::new(times, values.clone(), values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn f0(&self) -> &[f64] {
        &self.f0
    }

    pub fn f1(&self) -> &[f64] {
        &self.f1
    }

    pub fn component(&self, j: u8) -> &[f64] {
        if j == 0 {
            &self.f0
        } else {
            &self.f1
        }
    }

    /// Piecewise-linear evaluation of `cdf` (one of the components) at `s`;
    /// zero for `s < 0`, one for `s > T`.
    pub fn interpolate(&self, cdf: &[f64], s: f64) -> f64 {
        let times = &self.times;
        if s < 0.0 {
            return 0.0;
        }
        if s >= self.horizon() {
            return 1.0;
        }
        let k = times.partition_point(|&t| t <= s).saturating_sub(1);
        let (t0, t1) = (times[k], times[k + 1]);
        let w = (s - t0) / (t1 - t0);
        cdf[k] + w * (cdf[k + 1] - cdf[k])
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.times == other.times
    }

    /// Componentwise convex combination `(1 - rho) self + rho other`.
    pub fn damped_toward(&self, other: &Self, rho: f64) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch("damping requires a shared time grid".into()));
        }
        let mix =
            |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| (1.0 - rho) * x + rho * y).collect() };
        Self::new(self.times.clone(), mix(&self.f0, &other.f0), mix(&self.f1, &other.f1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_satisfy_invariants() {
        for mu in [
            StoppedMeasurePair::uniform(5.0, 50).unwrap(),
            StoppedMeasurePair::mass_at_zero(5.0, 50).unwrap(),
            StoppedMeasurePair::mass_at_horizon(5.0, 50).unwrap(),
        ] {
            assert_eq!(*mu.f0().last().unwrap(), 1.0);
            assert_eq!(mu.times().len(), 51);
            assert_eq!(mu.horizon(), 5.0);
        }
    }

    #[test]
    fn rejects_decreasing_cdf() {
        let times = uniform_grid(1.0, 2);
        let err = StoppedMeasurePair::new(times, vec![0.0, 0.6, 1.0], vec![0.0, 0.7, 0.5]);
        assert!(err.is_ok(), "terminal value is pinned to one");
        let times = uniform_grid(1.0, 3);
        let err = StoppedMeasurePair::new(times, vec![0.0, 0.6, 0.4, 1.0], vec![0.0; 4]);
        assert!(err.is_err());
    }

    #[test]
    fn interpolation_is_piecewise_linear() {
        let mu = StoppedMeasurePair::uniform(4.0, 4).unwrap();
        assert!((mu.interpolate(mu.f0(), 1.3) - 1.3 / 4.0).abs() < 1e-15);
        assert_eq!(mu.interpolate(mu.f0(), -1.0), 0.0);
        assert_eq!(mu.interpolate(mu.f0(), 4.0), 1.0);
    }

    #[test]
    fn damping_keeps_terminal_one() {
        let a = StoppedMeasurePair::uniform(5.0, 10).unwrap();
        let b = StoppedMeasurePair::mass_at_zero(5.0, 10).unwrap();
        let c = a.damped_toward(&b, 0.3).unwrap();
        assert_eq!(*c.f1().last().unwrap(), 1.0);
        assert!((c.f0()[5] - (0.7 * 0.5 + 0.3)).abs() < 1e-15);
    }
}
