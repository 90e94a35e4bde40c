//! The population map `Phi` and its damped fixed-point iteration.

use serde::{Deserialize, Serialize};

use crate::agent::{solve_value, Boundaries, ValueSurface};
use crate::error::{Error, Result};
use crate::filtering::VolatilityCurve;
use crate::model::{ProblemConfig, StoppedMeasurePair};
use crate::population::response_measure;

/// Sup-distance between the CDFs of two measure pairs, maximised over both components.
pub fn kolmogorov_distance(mu: &StoppedMeasurePair, nu: &StoppedMeasurePair) -> Result<f64> {
    if !mu.same_grid(nu) {
        return Err(Error::GridMismatch("measures on different time grids".into()));
    }
    let d = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(d(mu.f0(), nu.f0()).max(d(mu.f1(), nu.f1())))
}

/// Starting measure for the fixed-point iteration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialMeasure {
    /// Both CDFs `t / T`.
    #[default]
    Uniform,
    /// Everyone stops at time 0.
    MassAtZero,
    /// Nobody stops before the horizon.
    MassAtHorizon,
}

impl InitialMeasure {
    pub fn build(self, horizon: f64, n_intervals: usize) -> Result<StoppedMeasurePair> {
        match self {
            InitialMeasure::Uniform => StoppedMeasurePair::uniform(horizon, n_intervals),
            InitialMeasure::MassAtZero => StoppedMeasurePair::mass_at_zero(horizon, n_intervals),
            InitialMeasure::MassAtHorizon => StoppedMeasurePair::mass_at_horizon(horizon, n_intervals),
        }
    }
}

/// One application of `Phi`: the volatility induced by the input measure, the
/// agent's value surface under it, and the resulting stopping-time laws.
#[derive(Clone, Debug)]
pub struct PhiOutput {
    pub eta: VolatilityCurve,
    pub surface: ValueSurface,
    pub response: StoppedMeasurePair,
}

/// Applies `Phi` to `mu`. The Monte Carlo seed is taken from the config, so
/// repeated applications share random numbers.
pub fn apply_phi(mu: &StoppedMeasurePair, config: &ProblemConfig) -> Result<PhiOutput> {
    let mollifier = config.mollifier()?;
    let eta = config.signal.volatility_curve(mu, &mollifier)?;
    let surface = solve_value(&eta, &config.loss, config.c, config.horizon, &config.grid)?;
    let response = response_measure(&surface, &eta, config.prior, &config.mc)?;
    Ok(PhiOutput { eta, surface, response })
}

/// Outcome of [`fixed_point`].
#[derive(Clone, Debug)]
pub struct EquilibriumResult {
    /// Last iterate `mu_k`.
    pub measure: StoppedMeasurePair,
    /// `Phi(mu_k)`, with the surface and volatility behind it.
    pub phi: PhiOutput,
    /// Number of damped updates performed.
    pub iterations: usize,
    /// `d(mu_0, Phi(mu_0))`.
    pub initial_distance: f64,
    /// `d(mu_k, Phi(mu_k))` for `k = 1..=iterations`.
    pub distances: Vec<f64>,
    /// Sup-distance between the boundaries of successive best responses.
    pub boundary_distances: Vec<f64>,
    pub converged: bool,
    pub config: ProblemConfig,
    pub seed: u64,
}

impl EquilibriumResult {
    pub fn boundaries(&self) -> &Boundaries {
        &self.phi.surface.boundaries
    }

    pub fn surface(&self) -> &ValueSurface {
        &self.phi.surface
    }

    /// `V(0, prior)` of the final best response.
    pub fn value_at_prior(&self) -> f64 {
        self.phi.surface.value_at(0.0, self.config.prior)
    }
}

/// Iterates `mu_{k+1} = (1 - rho) mu_k + rho Phi(mu_k)` from `initial` until
/// `d(mu_k, Phi(mu_k)) <= tol` or `max_iter` updates, with `rho`, `tol` and
/// `max_iter` from `config.fixed_point` (`rho = 1` when `lambda1 = 0`).
/// Non-convergence is reported through `converged`, not as an error.
pub fn fixed_point(initial: StoppedMeasurePair, config: &ProblemConfig) -> Result<EquilibriumResult> {
    config.validate()?;
    let fp = config.fixed_point;
    if initial.times().len() != config.grid.n_time + 1 || (initial.horizon() - config.horizon).abs() > 1e-12 {
        return Err(Error::GridMismatch(
            "initial measure must live on the solver's time grid".into(),
        ));
    }
    // Without interaction Phi is constant, so its image is already the fixed point.
    let rho = if config.signal.lambda1 == 0.0 { 1.0 } else { fp.damping };
    let mut mu = initial;
    let mut phi = apply_phi(&mu, config)?;
    let initial_distance = kolmogorov_distance(&mu, &phi.response)?;
    let mut distances = Vec::new();
    let mut boundary_distances = Vec::new();
    let mut converged = initial_distance <= fp.tol;
    log::info!("fixed point: d0 = {initial_distance:.3e}");
    while !converged && distances.len() < fp.max_iter {
        mu = mu.damped_toward(&phi.response, rho)?;
        let next = apply_phi(&mu, config)?;
        let d = kolmogorov_distance(&mu, &next.response)?;
        boundary_distances.push(next.surface.boundaries.sup_distance(&phi.surface.boundaries)?);
        distances.push(d);
        phi = next;
        converged = d <= fp.tol;
        log::info!("fixed point: iteration {} distance {d:.3e}", distances.len());
    }
    Ok(EquilibriumResult {
        measure: mu,
        phi,
        iterations: distances.len(),
        initial_distance,
        distances,
        boundary_distances,
        converged,
        config: config.clone(),
        seed: config.mc.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        let a = StoppedMeasurePair::uniform(1.0, 10).unwrap();
        assert_eq!(kolmogorov_distance(&a, &a).unwrap(), 0.0);
        let b = StoppedMeasurePair::from_fn(1.0, 10, |t| (t + 0.1).min(1.0)).unwrap();
        assert!((kolmogorov_distance(&a, &b).unwrap() - 0.1).abs() < 1e-12);
        let c = StoppedMeasurePair::uniform(1.0, 20).unwrap();
        assert!(kolmogorov_distance(&a, &c).is_err());
    }
}
