use super::lcp::{obstacle_step, StepWork};
use super::surface::{Boundaries, ValueSurface};
use crate::error::{Error, Result};
use crate::filtering::VolatilityCurve;
use crate::model::measure::uniform_grid;
use crate::model::{GridConfig, LossModel};

pub(crate) fn check_inputs(
    eta: &VolatilityCurve,
    loss: &LossModel,
    c: f64,
    horizon: f64,
    grid: &GridConfig,
) -> Result<()> {
    loss.validate()?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Config(format!("c must be positive, got {c}")));
    }
    if !(horizon > 0.0) || (eta.horizon() - horizon).abs() > 1e-12 * horizon.max(1.0) {
        return Err(Error::GridMismatch(format!(
            "volatility curve ends at {}, horizon is {horizon}",
            eta.horizon()
        )));
    }
    if grid.n_space < 2 || grid.n_time < 2 {
        return Err(Error::Config("grid sizes must be at least 2".into()));
    }
    if grid.n_space < 50 {
        log::warn!(
            "pi grid with {} intervals is too coarse for accurate boundaries",
            grid.n_space
        );
    }
    Ok(())
}

/// Backward induction on arbitrary increasing `times` ending at the horizon.
fn solve_rows(eta: &VolatilityCurve, loss: &LossModel, c: f64, times: &[f64], pis: &[f64]) -> Result<Vec<f64>> {
    let w = pis.len();
    let m = w - 2;
    let h = pis[1] - pis[0];
    let g: Vec<f64> = pis.iter().map(|&p| loss.g(p)).collect();
    let shape: Vec<f64> = pis[1..w - 1]
        .iter()
        .map(|&p| 0.5 * (p * (1.0 - p)).powi(2) / (h * h))
        .collect();

    let n_t = times.len() - 1;
    let mut values = vec![0.0; times.len() * w];
    values[n_t * w..].copy_from_slice(&g);
    let (mut lower, mut diag, mut upper) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    let mut rhs = vec![0.0; m];
    let mut v = vec![0.0; m];
    let mut work = StepWork::new(m);
    for n in (0..n_t).rev() {
        let dt = times[n + 1] - times[n];
        let e2 = eta.eta(times[n]).powi(2);
        for j in 0..m {
            let a = dt * e2 * shape[j];
            lower[j] = -a;
            upper[j] = -a;
            diag[j] = 1.0 + 2.0 * a;
        }
        let next = &values[(n + 1) * w..(n + 2) * w];
        for j in 0..m {
            rhs[j] = next[j + 1] + c * dt;
        }
        obstacle_step(&lower, &diag, &upper, &rhs, &g[1..w - 1], &mut v, &mut work);
        let row = &mut values[n * w..(n + 1) * w];
        row[0] = 0.0;
        row[w - 1] = 0.0;
        for j in 0..m {
            if !v[j].is_finite() {
                return Err(Error::NonFinite {
                    time_index: n,
                    space_index: j + 1,
                });
            }
            // The policy solve returns the obstacle exactly on stop nodes;
            // the min guards the invariant against rounding elsewhere.
            row[j + 1] = v[j].min(g[j + 1]);
        }
    }
    Ok(values)
}

/// Solves the obstacle problem `min(-(d_t V + L V) - c, V - g) = 0` with
/// `V(T, .) = g` backward in time on a uniform grid.
///
/// Each step is implicit Euler for `d_t V + (eta(t)^2/2) pi^2 (1-pi)^2 V'' = -c`
/// with `V = 0` at `pi = 0, 1`, coupled with the constraint `V <= g`. The
/// per-step complementarity problem is solved exactly (see `lcp`), starting
/// from the projection `min(V, g)` of the unconstrained step.
pub fn solve_value(
    eta: &VolatilityCurve,
    loss: &LossModel,
    c: f64,
    horizon: f64,
    grid: &GridConfig,
) -> Result<ValueSurface> {
    check_inputs(eta, loss, c, horizon, grid)?;
    let times = uniform_grid(horizon, grid.n_time);
    let pis = uniform_grid(1.0, grid.n_space);
    let values = solve_rows(eta, loss, c, &times, &pis)?;
    ValueSurface::from_values(times, pis, *loss, values)
}

/// Boundaries just before the horizon, resolved on a time grid graded
/// geometrically toward `T`: nodes at `T - window q^j`, `j = 0..=n_steps`,
/// with the last gap equal to `min_gap`, plus `T` itself.
#[allow(clippy::too_many_arguments)]
pub fn terminal_boundaries(
    eta: &VolatilityCurve,
    loss: &LossModel,
    c: f64,
    horizon: f64,
    n_space: usize,
    window: f64,
    min_gap: f64,
    n_steps: usize,
) -> Result<Boundaries> {
    check_inputs(
        eta,
        loss,
        c,
        horizon,
        &GridConfig {
            n_space,
            n_time: n_steps.max(2),
        },
    )?;
    if !(0.0 < min_gap && min_gap < window && window <= horizon) {
        return Err(Error::Config(format!(
            "need 0 < min_gap < window <= T, got {min_gap}, {window}"
        )));
    }
    let q = (min_gap / window).powf(1.0 / n_steps as f64);
    let mut times: Vec<f64> = (0..=n_steps).map(|j| horizon - window * q.powi(j as i32)).collect();
    times.push(horizon);
    let pis = uniform_grid(1.0, n_space);
    let values = solve_rows(eta, loss, c, &times, &pis)?;
    let surface = ValueSurface::from_values(times, pis, *loss, values)?;
    Ok(surface.boundaries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GridConfig {
        GridConfig {
            n_space: 200,
            n_time: 200,
        }
    }

    #[test]
    fn terminal_row_and_endpoints() {
        let eta = VolatilityCurve::constant(1.0, 5.0, 10).unwrap();
        let s = solve_value(&eta, &LossModel::CrossEntropy, 0.1, 5.0, &small()).unwrap();
        let last = s.n_times() - 1;
        for i in 0..s.n_space() {
            assert_eq!(s.value(last, i), LossModel::CrossEntropy.g(s.pis[i]));
        }
        for k in 0..s.n_times() {
            assert_eq!(s.value(k, 0), 0.0);
            assert_eq!(s.value(k, s.n_space() - 1), 0.0);
        }
    }

    #[test]
    fn horizon_mismatch_is_rejected() {
        let eta = VolatilityCurve::constant(1.0, 4.0, 10).unwrap();
        assert!(solve_value(&eta, &LossModel::CrossEntropy, 0.1, 5.0, &small()).is_err());
    }
}
