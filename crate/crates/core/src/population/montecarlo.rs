use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::bounds::TransformedBoundaries;
use crate::agent::ValueSurface;
use crate::error::{Error, Result};
use crate::filtering::paths::StepGrid;
use crate::filtering::{logit, VolatilityCurve};
use crate::model::{McConfig, StoppedMeasurePair};
use crate::rng::{substream, StreamTag};

/// Per-step data shared by all paths.
struct Walk {
    times: Vec<f64>,
    drift: Vec<f64>,
    sd: Vec<f64>,
    var: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Walk {
    fn new(bounds: &TransformedBoundaries, eta: &VolatilityCurve, theta: u8, dt: f64) -> Result<Self> {
        if (eta.horizon() - bounds.horizon()).abs() > 1e-12 * bounds.horizon().max(1.0) {
            return Err(Error::GridMismatch(
                "boundaries and volatility have different horizons".into(),
            ));
        }
        let grid = StepGrid::new(eta, 0.0, dt)?;
        let sign = if theta == 1 { 0.5 } else { -0.5 };
        let (lower, upper) = grid.times.iter().map(|&t| bounds.at(t)).unzip();
        Ok(Walk {
            drift: grid.dalpha.iter().map(|da| sign * da).collect(),
            sd: grid.dalpha.iter().map(|da| da.sqrt()).collect(),
            var: grid.dalpha.clone(),
            times: grid.times,
            lower,
            upper,
        })
    }

    /// First exit time of one path from `(m, M)`, capped at the horizon.
    fn exit_time<R: Rng>(&self, l0: f64, increments: &mut R, bridge: &mut R) -> f64 {
        if !(l0 > self.lower[0] && l0 < self.upper[0]) {
            return 0.0;
        }
        let mut l = l0;
        for k in 0..self.drift.len() {
            let z: f64 = increments.sample(StandardNormal);
            let next = l + self.drift[k] + self.sd[k] * z;
            let (t0, t1) = (self.times[k], self.times[k + 1]);
            let d_lo = (l - self.lower[k], next - self.lower[k + 1]);
            let d_hi = (self.upper[k] - l, self.upper[k + 1] - next);
            if d_lo.1 <= 0.0 || d_hi.1 <= 0.0 {
                let frac = |d: (f64, f64)| if d.1 <= 0.0 { d.0 / (d.0 - d.1) } else { 1.0 };
                let s = frac(d_lo).min(frac(d_hi));
                return t0 + s * (t1 - t0);
            }
            // Probability that the Brownian bridge between the two endpoints
            // touched a linearly moving boundary.
            let p_lo = (-2.0 * d_lo.0 * d_lo.1 / self.var[k]).exp();
            let p_hi = (-2.0 * d_hi.0 * d_hi.1 / self.var[k]).exp();
            let p = 1.0 - (1.0 - p_lo) * (1.0 - p_hi);
            let u: f64 = bridge.random();
            if u < p {
                return 0.5 * (t0 + t1);
            }
            l = next;
        }
        *self.times.last().unwrap()
    }
}

/// Exit times of `n_paths` conditional paths of `L` from `(m, M)`.
pub fn hitting_times_mc(
    bounds: &TransformedBoundaries,
    eta: &VolatilityCurve,
    l0: f64,
    theta: u8,
    n_paths: usize,
    dt: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if n_paths == 0 {
        return Err(Error::Config("n_paths must be at least 1".into()));
    }
    let walk = Walk::new(bounds, eta, theta, dt)?;
    Ok((0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut inc = substream(seed, StreamTag::increments(theta), i);
            let mut bridge = substream(seed, StreamTag::bridge(theta), i);
            walk.exit_time(l0, &mut inc, &mut bridge)
        })
        .collect())
}

/// Empirical CDF of `samples` at each node of `times`; the last value is 1.
pub(crate) fn empirical_cdf(mut samples: Vec<f64>, times: &[f64]) -> Vec<f64> {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut cdf: Vec<f64> = times
        .iter()
        .map(|&t| samples.partition_point(|&s| s <= t) as f64 / n)
        .collect();
    *cdf.last_mut().unwrap() = 1.0;
    cdf
}

/// CDF of the first exit time of `L` (conditional on `theta`) from the band
/// `(m(t), M(t))`, capped at the horizon, on the boundaries' time grid.
///
/// Increments are exact Gaussian. Between steps a crossing is also registered
/// with the Brownian-bridge probability `exp(-2 d0 d1 / da)` against each
/// boundary, where `d0, d1` are the distances at the two step ends.
pub fn hitting_cdf_mc(
    bounds: &TransformedBoundaries,
    eta: &VolatilityCurve,
    l0: f64,
    theta: u8,
    n_paths: usize,
    dt: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    let taus = hitting_times_mc(bounds, eta, l0, theta, n_paths, dt, seed)?;
    Ok(empirical_cdf(taus, &bounds.times))
}

/// Conditional stopping-time laws induced by the boundaries of `surface`
/// for an agent starting at `pi0`.
pub fn response_measure(
    surface: &ValueSurface,
    eta: &VolatilityCurve,
    pi0: f64,
    mc: &McConfig,
) -> Result<StoppedMeasurePair> {
    let bounds = TransformedBoundaries::from_boundaries(&surface.boundaries);
    let l0 = logit(pi0)?;
    let f0 = hitting_cdf_mc(&bounds, eta, l0, 0, mc.paths, mc.dt, mc.seed)?;
    let f1 = hitting_cdf_mc(&bounds, eta, l0, 1, mc.paths, mc.dt, mc.seed)?;
    StoppedMeasurePair::new(bounds.times, f0, f1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empirical_cdf_counts_right_continuously() {
        let cdf = empirical_cdf(vec![0.5, 0.0, 1.0, 0.25], &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(cdf, vec![0.25, 0.5, 0.75, 0.75, 1.0]);
    }

    #[test]
    fn start_on_degenerate_band_stops_immediately() {
        let eta = VolatilityCurve::constant(1.0, 1.0, 10).unwrap();
        let b = TransformedBoundaries::new(vec![0.0, 0.5, 1.0], vec![0.0; 3], vec![0.0; 3]).unwrap();
        let cdf = hitting_cdf_mc(&b, &eta, 0.0, 1, 100, 0.01, 1).unwrap();
        assert!(cdf.iter().all(|&f| f == 1.0));
    }
}
