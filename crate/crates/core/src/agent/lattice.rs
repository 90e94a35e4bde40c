//! Binomial approximations of the stopping problem on a uniform clock grid.
//!
//! With `n` clock steps of size `da = alpha(T) / n`, the log-likelihood walks
//! `+-sqrt(da)`. [`solve_value_lattice`] runs backward induction on the
//! recombining lattice, using the martingale weights of `S(L)`.
//! [`brute_force_tree_value`] enumerates the non-recombining tree of Bayes
//! updates and is the reference for it.

use super::obstacle::check_inputs;
use crate::error::{Error, Result};
use crate::filtering::{logit, sigmoid, VolatilityCurve};
use crate::model::{GridConfig, LossModel};

/// Largest tree depth accepted by [`brute_force_tree_value`].
pub const MAX_TREE_STEPS: usize = 6;

fn step_costs(eta: &VolatilityCurve, c: f64, n: usize) -> Result<Vec<f64>> {
    let da = eta.total_clock() / n as f64;
    let mut t = vec![0.0; n + 1];
    for (k, tk) in t.iter_mut().enumerate().skip(1) {
        *tk = eta.inverse_clock((k as f64 * da).min(eta.total_clock()))?;
    }
    Ok(t.windows(2).map(|w| c * (w[1] - w[0])).collect())
}

fn check_common(eta: &VolatilityCurve, loss: &LossModel, c: f64, horizon: f64, pi0: f64, n: usize) -> Result<()> {
    if !(c >= 0.0) {
        return Err(Error::Config(format!("c must be nonnegative, got {c}")));
    }
    check_inputs(
        eta,
        loss,
        c.max(f64::MIN_POSITIVE),
        horizon,
        &GridConfig { n_space: 50, n_time: 2 },
    )?;
    if n == 0 {
        return Err(Error::Config("need at least one step".into()));
    }
    logit(pi0).map(|_| ())
}

/// `V(0, pi0)` by backward induction on the recombining lattice.
pub fn solve_value_lattice(
    eta: &VolatilityCurve,
    loss: &LossModel,
    c: f64,
    horizon: f64,
    pi0: f64,
    n_steps: usize,
) -> Result<f64> {
    check_common(eta, loss, c, horizon, pi0, n_steps)?;
    let costs = step_costs(eta, c, n_steps)?;
    let delta = (eta.total_clock() / n_steps as f64).sqrt();
    let l0 = logit(pi0)?;
    let node = |k: usize, j: usize| l0 + (2.0 * j as f64 - k as f64) * delta;
    let mut v: Vec<f64> = (0..=n_steps).map(|j| loss.g(sigmoid(node(n_steps, j)))).collect();
    for k in (0..n_steps).rev() {
        for j in 0..=k {
            let l = node(k, j);
            let (lo, mid, hi) = (sigmoid(l - delta), sigmoid(l), sigmoid(l + delta));
            let p = (mid - lo) / (hi - lo);
            let cont = costs[k] + p * v[j + 1] + (1.0 - p) * v[j];
            v[j] = loss.g(mid).min(cont);
        }
    }
    Ok(v[0])
}

/// `V(0, pi0)` by exhaustive backward induction over all `2^n` signal paths.
pub fn brute_force_tree_value(
    eta: &VolatilityCurve,
    loss: &LossModel,
    c: f64,
    horizon: f64,
    pi0: f64,
    n_steps: usize,
) -> Result<f64> {
    if n_steps > MAX_TREE_STEPS {
        return Err(Error::Config(format!("tree depth {n_steps} exceeds {MAX_TREE_STEPS}")));
    }
    check_common(eta, loss, c, horizon, pi0, n_steps)?;
    let costs = step_costs(eta, c, n_steps)?;
    let delta = (eta.total_clock() / n_steps as f64).sqrt();
    // Probability of an up-move given theta = 1 and theta = 0.
    let q1 = sigmoid(delta);
    let q0 = 1.0 - q1;

    fn node(pi: f64, k: usize, costs: &[f64], q1: f64, q0: f64, loss: &LossModel) -> f64 {
        let stop = loss.g(pi);
        if k == costs.len() {
            return stop;
        }
        let p_up = pi * q1 + (1.0 - pi) * q0;
        let pi_up = pi * q1 / p_up;
        let pi_down = pi * (1.0 - q1) / (1.0 - p_up);
        let cont = costs[k]
            + p_up * node(pi_up, k + 1, costs, q1, q0, loss)
            + (1.0 - p_up) * node(pi_down, k + 1, costs, q1, q0, loss);
        stop.min(cont)
    }
    Ok(node(pi0, 0, &costs, q1, q0, loss))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_step_by_hand() {
        let eta = VolatilityCurve::constant(1.0, 1.0, 4).unwrap();
        let loss = LossModel::CrossEntropy;
        let pi0 = 0.5;
        let (up, down) = (sigmoid(1.0), sigmoid(-1.0));
        let p = (pi0 - down) / (up - down);
        let hand = loss.g(pi0).min(0.1 + p * loss.g(up) + (1.0 - p) * loss.g(down));
        let tree = brute_force_tree_value(&eta, &loss, 0.1, 1.0, pi0, 1).unwrap();
        assert!((tree - hand).abs() < 1e-15);
    }

    #[test]
    fn depth_limit() {
        let eta = VolatilityCurve::constant(1.0, 1.0, 4).unwrap();
        assert!(brute_force_tree_value(&eta, &LossModel::CrossEntropy, 0.1, 1.0, 0.5, 7).is_err());
    }
}
