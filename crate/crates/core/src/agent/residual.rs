use rayon::prelude::*;
use serde::Serialize;

use super::surface::Boundaries;
use crate::error::{Error, Result};
use crate::filtering::paths::{draw_theta, fill_path, StepGrid};
use crate::filtering::{logit, sigmoid, VolatilityCurve};
use crate::model::LossModel;
use crate::rng::{substream, StreamTag};

/// Monte Carlo residuals (right side minus left side) of the two boundary
/// integral equations, started at `b(t)` and at `B(t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegralResidual {
    pub lower: f64,
    pub upper: f64,
    pub se_lower: f64,
    pub se_upper: f64,
}

fn interp(times: &[f64], ys: &[f64], t: f64) -> f64 {
    let (k, w) = super::surface::locate(times, t);
    (1.0 - w) * ys[k] + w * ys[k + 1]
}

/// One equation: returns (mean, standard error) of
/// `g(Pi_T) + c ∫ 1{Pi in (b, B)} du - ∫ (L g)(u, Pi_u) 1{Pi outside (b, B)} du - g(start)`.
#[allow(clippy::too_many_arguments)]
fn one_side(
    bounds: &Boundaries,
    eta: &VolatilityCurve,
    loss: &LossModel,
    c: f64,
    grid: &StepGrid,
    start: f64,
    n_paths: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let l0 = logit(start)?;
    let lower: Vec<f64> = grid
        .times
        .iter()
        .map(|&t| interp(&bounds.times, &bounds.lower, t))
        .collect();
    let upper: Vec<f64> = grid
        .times
        .iter()
        .map(|&t| interp(&bounds.times, &bounds.upper, t))
        .collect();
    let eta2: Vec<f64> = grid.times.iter().map(|&t| eta.eta(t).powi(2)).collect();
    let dts: Vec<f64> = grid.times.windows(2).map(|w| w[1] - w[0]).collect();
    let smooth = loss.is_smooth();
    let g0 = loss.g(start);

    let samples: Vec<f64> = (0..n_paths)
        .into_par_iter()
        .map_init(
            || vec![0.0; grid.times.len()],
            |path, i| {
                let theta = draw_theta(seed, i as u64, start);
                let mut rng = substream(seed, StreamTag::increments(theta), i as u64);
                fill_path(&mut rng, grid, l0, theta, path);
                let integrand = |k: usize| {
                    let pi = sigmoid(path[k]);
                    if pi > lower[k] && pi < upper[k] {
                        c
                    } else if smooth {
                        -eta2[k] * loss.ag(pi)
                    } else {
                        0.0
                    }
                };
                let mut acc = 0.0;
                let mut prev = integrand(0);
                for (k, dt) in dts.iter().enumerate() {
                    let next = integrand(k + 1);
                    acc += 0.5 * dt * (prev + next);
                    prev = next;
                }
                loss.g(sigmoid(*path.last().unwrap())) + acc - g0
            },
        )
        .collect();
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Residuals of the integral equations satisfied by the free boundaries,
/// evaluated by Monte Carlo from time `t` with the observer's law of `Pi`.
/// Time integrals use the trapezoid rule on steps of size `dt`.
#[allow(clippy::too_many_arguments)]
pub fn integral_residual(
    bounds: &Boundaries,
    eta: &VolatilityCurve,
    loss: &LossModel,
    c: f64,
    t: f64,
    n_paths: usize,
    dt: f64,
    seed: u64,
) -> Result<IntegralResidual> {
    if n_paths < 2 {
        return Err(Error::Config("need at least two paths".into()));
    }
    let bounds = bounds.held_at_horizon();
    let grid = StepGrid::new(eta, t, dt)?;
    let b = interp(&bounds.times, &bounds.lower, t);
    let bb = interp(&bounds.times, &bounds.upper, t);
    let (lower, se_lower) = one_side(&bounds, eta, loss, c, &grid, b, n_paths, seed)?;
    let (upper, se_upper) = one_side(&bounds, eta, loss, c, &grid, bb, n_paths, seed ^ 0x5eed)?;
    Ok(IntegralResidual {
        lower,
        upper,
        se_lower,
        se_upper,
    })
}
