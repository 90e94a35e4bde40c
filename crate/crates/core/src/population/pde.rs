use super::bounds::TransformedBoundaries;
use crate::agent::surface::locate;
use crate::agent::tridiag::solve_tridiagonal;
use crate::error::{Error, Result};
use crate::filtering::VolatilityCurve;
use crate::model::measure::uniform_grid;

/// Output of [`hitting_cdf_pde`].
#[derive(Clone, Debug, PartialEq)]
pub struct PdeHitting {
    /// CDF on the boundaries' time grid, terminal value 1.
    pub cdf: Vec<f64>,
    /// Largest `|survival + absorbed - 1|` over all steps.
    pub max_mass_error: f64,
}

/// CDF of the first exit time of `L` from `(m, M)` from the forward equation
/// of the killed density.
///
/// In the coordinate `x = (l - m(t)) / w(t)`, `w = M - m`, the band is fixed
/// at `[0, 1]` and the density `p(t, x)` solves
/// `p_t = -(beta p)_x + (eta^2 / (2 w^2)) p_xx` with `p = 0` at both ends, where
/// `beta = (mu - m' - x w') / w` and `mu = +-eta^2 / 2`. The scheme is a
/// cell-centred finite volume with central fluxes and implicit Euler steps;
/// the flux through the ends is the absorbed mass.
pub fn hitting_cdf_pde(
    bounds: &TransformedBoundaries,
    eta: &VolatilityCurve,
    l0: f64,
    theta: u8,
    n_cells: usize,
    n_steps: usize,
) -> Result<PdeHitting> {
    if n_cells < 4 || n_steps < 1 {
        return Err(Error::Config("need at least 4 cells and 1 step".into()));
    }
    if bounds.lower.iter().chain(&bounds.upper).any(|v| !v.is_finite()) {
        return Err(Error::Domain("absorbed density needs finite boundaries".into()));
    }
    let horizon = bounds.horizon();
    if (eta.horizon() - horizon).abs() > 1e-12 * horizon.max(1.0) {
        return Err(Error::GridMismatch(
            "boundaries and volatility have different horizons".into(),
        ));
    }
    let times = uniform_grid(horizon, n_steps);
    let n = n_cells;
    let h = 1.0 / n as f64;
    let sign = if theta == 1 { 0.5 } else { -0.5 };

    let mut absorbed = vec![0.0; times.len()];
    let mut p = vec![0.0; n];
    let (m0, mm0) = bounds.at(0.0);
    let width0 = mm0 - m0;
    let x0 = if width0 > 0.0 { (l0 - m0) / width0 } else { -1.0 };
    if !(x0 > 0.0 && x0 < 1.0) {
        absorbed.iter_mut().for_each(|a| *a = 1.0);
        return Ok(PdeHitting {
            cdf: project(&times, &absorbed, &bounds.times),
            max_mass_error: 0.0,
        });
    }
    // Split the unit mass between the two cells whose centres bracket x0.
    let s = x0 / h - 0.5;
    if s <= 0.0 {
        p[0] = 1.0 / h;
    } else if s >= (n - 1) as f64 {
        p[n - 1] = 1.0 / h;
    } else {
        let j = s.floor() as usize;
        let w = s - j as f64;
        p[j] = (1.0 - w) / h;
        p[j + 1] = w / h;
    }

    let (mut lower, mut diag, mut upper) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut scratch = vec![0.0; n];
    let mut max_err: f64 = 0.0;
    let mut total_absorbed = 0.0;
    for k in 1..times.len() {
        let (t0, t1) = (times[k - 1], times[k]);
        let dt = t1 - t0;
        let (ma, mma) = bounds.at(t0);
        let (mb, mmb) = bounds.at(t1);
        let w = mmb - mb;
        if !(w > 1e-12) {
            total_absorbed = 1.0;
            p.iter_mut().for_each(|v| *v = 0.0);
            absorbed[k] = 1.0;
            continue;
        }
        let dm = (mb - ma) / dt;
        let dw = ((mmb - mb) - (mma - ma)) / dt;
        let e2 = eta.eta(t1).powi(2);
        let mu = sign * e2;
        let d = 0.5 * e2 / (w * w);
        let r = dt / h;
        let beta = |x: f64| (mu - dm - x * dw) / w;

        for v in diag.iter_mut() {
            *v = 1.0;
        }
        for v in lower.iter_mut().chain(upper.iter_mut()) {
            *v = 0.0;
        }
        for i in 0..n - 1 {
            let bf = beta((i + 1) as f64 * h);
            if bf.abs() * h / d > 2.0 {
                return Err(Error::GridTooCoarse(format!(
                    "cell Peclet number {:.3} > 2 at t = {t1}",
                    bf.abs() * h / d
                )));
            }
            // Flux through face i + 1/2 enters cell i with + and cell i + 1 with -.
            let a = 0.5 * bf + d / h;
            let b = 0.5 * bf - d / h;
            diag[i] += r * a;
            upper[i] += r * b;
            lower[i + 1] -= r * a;
            diag[i + 1] -= r * b;
        }
        diag[0] += r * 2.0 * d / h;
        diag[n - 1] += r * 2.0 * d / h;
        solve_tridiagonal(&lower, &diag, &upper, &mut p, &mut scratch);
        total_absorbed += dt * 2.0 * d / h * (p[0] + p[n - 1]);
        let mass: f64 = p.iter().sum::<f64>() * h;
        max_err = max_err.max((mass + total_absorbed - 1.0).abs());
        absorbed[k] = total_absorbed.min(1.0);
    }
    Ok(PdeHitting {
        cdf: project(&times, &absorbed, &bounds.times),
        max_mass_error: max_err,
    })
}

/// Linear interpolation of the absorbed mass onto `out`, with terminal value 1.
fn project(times: &[f64], absorbed: &[f64], out: &[f64]) -> Vec<f64> {
    let mut cdf: Vec<f64> = out
        .iter()
        .map(|&t| {
            let (k, w) = locate(times, t);
            ((1.0 - w) * absorbed[k] + w * absorbed[k + 1]).clamp(0.0, 1.0)
        })
        .collect();
    for k in 1..cdf.len() {
        cdf[k] = cdf[k].max(cdf[k - 1]);
    }
    *cdf.last_mut().unwrap() = 1.0;
    cdf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_is_conserved() {
        let eta = VolatilityCurve::constant(1.0, 2.0, 10).unwrap();
        let times = uniform_grid(2.0, 100);
        let lower = times.iter().map(|t| -1.5 + 0.3 * t).collect();
        let upper = times.iter().map(|t| 1.5 - 0.2 * t).collect();
        let b = TransformedBoundaries::new(times, lower, upper).unwrap();
        let r = hitting_cdf_pde(&b, &eta, 0.1, 1, 200, 400).unwrap();
        assert!(r.max_mass_error < 1e-6);
        assert!(r.cdf.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*r.cdf.last().unwrap(), 1.0);
    }

    #[test]
    fn reflection_symmetry() {
        let eta = VolatilityCurve::from_fn(2.0, 10, |t| 1.0 + 0.1 * t).unwrap();
        let times = uniform_grid(2.0, 50);
        let upper: Vec<f64> = times.iter().map(|t| 2.0 - 0.4 * t).collect();
        let lower: Vec<f64> = upper.iter().map(|u| -u).collect();
        let b = TransformedBoundaries::new(times, lower, upper).unwrap();
        let up = hitting_cdf_pde(&b, &eta, 0.0, 1, 200, 400).unwrap();
        let down = hitting_cdf_pde(&b, &eta, 0.0, 0, 200, 400).unwrap();
        for (a, c) in up.cdf.iter().zip(&down.cdf) {
            assert!((a - c).abs() < 1e-12);
        }
    }
}
