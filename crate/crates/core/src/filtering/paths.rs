use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{logit, sigmoid, VolatilityCurve};
use crate::error::{Error, Result};
use crate::rng::{substream, StreamTag};

/// Simulation time steps `t_0 < t_1 < ... < t_n = T` of size `dt` (the last one
/// possibly shorter), with the clock increments over each step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepGrid {
    pub times: Vec<f64>,
    pub dalpha: Vec<f64>,
}

impl StepGrid {
    pub fn new(eta: &VolatilityCurve, start: f64, dt: f64) -> Result<Self> {
        let horizon = eta.horizon();
        if !(dt > 0.0) || !(0.0..=horizon).contains(&start) {
            return Err(Error::Domain(format!("bad step grid: start {start}, dt {dt}")));
        }
        let n = (((horizon - start) / dt) - 1e-9).ceil().max(0.0) as usize;
        let mut times: Vec<f64> = (0..n).map(|k| start + k as f64 * dt).collect();
        times.push(horizon);
        let clock: Vec<f64> = times.iter().map(|&t| eta.clock_unchecked(t)).collect();
        let dalpha = clock.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(StepGrid { times, dalpha })
    }

    pub fn n_steps(&self) -> usize {
        self.dalpha.len()
    }
}

/// Sampled log-likelihood paths, stored row-major (`n_paths` rows of `n_steps + 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct PathEnsemble {
    pub dt: f64,
    pub seed: u64,
    pub times: Vec<f64>,
    pub theta: Vec<u8>,
    values: Vec<f64>,
}

impl PathEnsemble {
    pub fn n_paths(&self) -> usize {
        self.theta.len()
    }

    pub fn path(&self, i: usize) -> &[f64] {
        let w = self.times.len();
        &self.values[i * w..(i + 1) * w]
    }

    /// Values of `L` at step `k` across all paths.
    pub fn column(&self, k: usize) -> impl Iterator<Item = f64> + '_ {
        let w = self.times.len();
        self.values.iter().skip(k).step_by(w).copied()
    }

    /// Posterior `S(L)` at step `k` across all paths.
    pub fn posterior_column(&self, k: usize) -> impl Iterator<Item = f64> + '_ {
        self.column(k).map(sigmoid)
    }
}

/// Fills `out` with one conditional path started at `l0`.
pub(crate) fn fill_path<R: Rng>(rng: &mut R, grid: &StepGrid, l0: f64, theta: u8, out: &mut [f64]) {
    let sign = if theta == 1 { 0.5 } else { -0.5 };
    out[0] = l0;
    for (k, &da) in grid.dalpha.iter().enumerate() {
        let z: f64 = rng.sample(StandardNormal);
        out[k + 1] = out[k] + sign * da + da.sqrt() * z;
    }
}

fn check_paths(n_paths: usize) -> Result<()> {
    if n_paths == 0 {
        return Err(Error::Domain("n_paths must be at least 1".into()));
    }
    Ok(())
}

/// Paths of `L` conditional on `theta`, with exact Gaussian increments.
pub fn sample_conditional_paths(
    eta: &VolatilityCurve,
    l0: f64,
    theta: u8,
    dt: f64,
    n_paths: usize,
    seed: u64,
) -> Result<PathEnsemble> {
    check_paths(n_paths)?;
    let grid = StepGrid::new(eta, 0.0, dt)?;
    let w = grid.times.len();
    let mut values = vec![0.0; n_paths * w];
    values.par_chunks_mut(w).enumerate().for_each(|(i, row)| {
        let mut rng = substream(seed, StreamTag::increments(theta), i as u64);
        fill_path(&mut rng, &grid, l0, theta, row);
    });
    Ok(PathEnsemble {
        dt,
        seed,
        times: grid.times,
        theta: vec![theta; n_paths],
        values,
    })
}

/// Draws `theta ~ Bernoulli(pi0)` for path `i`.
pub(crate) fn draw_theta(seed: u64, i: u64, pi0: f64) -> u8 {
    let u: f64 = substream(seed, StreamTag::Nature, i).random();
    u8::from(u < pi0)
}

/// Paths of `L` under the observer's law: `theta` drawn per path with
/// probability `pi0` of being 1, then a conditional path from `logit(pi0)`.
pub fn sample_unconditional_paths(
    eta: &VolatilityCurve,
    pi0: f64,
    dt: f64,
    n_paths: usize,
    seed: u64,
) -> Result<PathEnsemble> {
    check_paths(n_paths)?;
    let l0 = logit(pi0)?;
    let grid = StepGrid::new(eta, 0.0, dt)?;
    let w = grid.times.len();
    let theta: Vec<u8> = (0..n_paths as u64).map(|i| draw_theta(seed, i, pi0)).collect();
    let mut values = vec![0.0; n_paths * w];
    values
        .par_chunks_mut(w)
        .zip(theta.par_iter())
        .enumerate()
        .for_each(|(i, (row, &th))| {
            let mut rng = substream(seed, StreamTag::increments(th), i as u64);
            fill_path(&mut rng, &grid, l0, th, row);
        });
    Ok(PathEnsemble {
        dt,
        seed,
        times: grid.times,
        theta,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_grid_covers_horizon() {
        let eta = VolatilityCurve::constant(1.0, 1.0, 10).unwrap();
        let g = StepGrid::new(&eta, 0.0, 0.3).unwrap();
        assert_eq!(g.times, vec![0.0, 0.3, 0.6, 0.8999999999999999, 1.0]);
        let total: f64 = g.dalpha.iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
        let g = StepGrid::new(&eta, 0.0, 0.25).unwrap();
        assert_eq!(g.n_steps(), 4);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let eta = VolatilityCurve::constant(1.0, 1.0, 10).unwrap();
        let a = sample_conditional_paths(&eta, 0.0, 1, 0.1, 50, 9).unwrap();
        let b = sample_conditional_paths(&eta, 0.0, 1, 0.1, 50, 9).unwrap();
        assert_eq!(a, b);
        let c = sample_conditional_paths(&eta, 0.0, 1, 0.1, 50, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn initial_value_is_shared() {
        let eta = VolatilityCurve::constant(1.0, 1.0, 10).unwrap();
        let e = sample_unconditional_paths(&eta, 0.3, 0.1, 20, 1).unwrap();
        let l0 = logit(0.3).unwrap();
        assert!(e.column(0).all(|l| l == l0));
    }
}
