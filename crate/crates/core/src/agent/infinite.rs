use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtering::logit;
use crate::model::measure::uniform_grid;
use crate::model::LossModel;

/// Stationary stopping problem with constant volatility.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InfiniteHorizonSolution {
    pub eta: f64,
    pub lower: f64,
    pub upper: f64,
    /// `|V'(b) - g'(b)|` at the lower boundary (the upper one mirrors it).
    pub smooth_fit_residual: f64,
    pub pis: Vec<f64>,
    pub values: Vec<f64>,
    #[serde(skip)]
    loss: LossModel,
    #[serde(skip)]
    level: f64,
    #[serde(skip)]
    k: f64,
}

/// `psi(pi) = (2 pi - 1) logit(pi)`, so that `pi^2 (1 - pi)^2 psi'' = 1`.
fn psi(pi: f64) -> f64 {
    (2.0 * pi - 1.0) * (pi / (1.0 - pi)).ln()
}

fn psi_prime(pi: f64) -> f64 {
    2.0 * (pi / (1.0 - pi)).ln() + 1.0 / (1.0 - pi) - 1.0 / pi
}

impl InfiniteHorizonSolution {
    /// `V_inf(pi)`: `g` outside `(b, B)`, the particular solution inside.
    pub fn value(&self, pi: f64) -> f64 {
        if pi <= self.lower || pi >= self.upper {
            self.loss.g(pi)
        } else {
            self.level - self.k * psi(pi)
        }
    }
}

/// Solves `(eta^2/2) pi^2 (1-pi)^2 V'' = -c` on `(b, 1-b)` with value matching
/// and smooth fit against `g`, for symmetric smooth losses.
///
/// Inside the continuation interval `V = A - k psi` with `k = 2c / eta^2`;
/// smooth fit reduces to the scalar equation `g'(b) + k psi'(b) = 0` on
/// `(0, 1/2)`, solved by bisection.
pub fn solve_infinite_horizon(eta: f64, loss: &LossModel, c: f64, n_space: usize) -> Result<InfiniteHorizonSolution> {
    loss.validate()?;
    if !loss.is_smooth() || !loss.is_symmetric() {
        return Err(Error::Domain(
            "the stationary problem needs a symmetric smooth loss".into(),
        ));
    }
    if !(eta > 0.0 && c > 0.0) {
        return Err(Error::Config(format!("need eta > 0 and c > 0, got {eta}, {c}")));
    }
    let k = 2.0 * c / (eta * eta);
    let f = |b: f64| loss.eval(b).map(|e| e.g_prime + k * psi_prime(b)).unwrap_or(f64::NAN);

    let (mut lo, mut hi) = (1e-12, 0.5 - 1e-6);
    if !(f(lo) < 0.0 && f(hi) > 0.0) {
        return Err(Error::NoInteriorSolution(format!(
            "smooth fit has no root in (0, 1/2) for eta = {eta}, c = {c}"
        )));
    }
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let b = 0.5 * (lo + hi);
    let level = loss.g(b) + k * psi(b);
    let mut sol = InfiniteHorizonSolution {
        eta,
        lower: b,
        upper: 1.0 - b,
        smooth_fit_residual: f(b).abs(),
        pis: uniform_grid(1.0, n_space.max(2)),
        values: vec![],
        loss: *loss,
        level,
        k,
    };
    sol.values = sol.pis.iter().map(|&p| sol.value(p)).collect();
    // logit is finite at b by construction; catches a degenerate bracket.
    logit(b)?;
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_solves_the_ode() {
        for &p in &[0.1, 0.3, 0.6, 0.85] {
            let h = 1e-4;
            let d2 = (psi(p + h) - 2.0 * psi(p) + psi(p - h)) / (h * h);
            assert!((d2 * (p * (1.0 - p)).powi(2) - 1.0).abs() < 1e-5);
            let h1 = 1e-6;
            let d1 = (psi(p + h1) - psi(p - h1)) / (2.0 * h1);
            assert!((d1 - psi_prime(p)).abs() < 1e-7);
        }
    }

    #[test]
    fn cross_entropy_band_and_smooth_fit() {
        let s = solve_infinite_horizon(1.0, &LossModel::CrossEntropy, 0.1, 1000).unwrap();
        assert!(0.0 < s.lower && s.lower < 0.5);
        assert_eq!(s.upper, 1.0 - s.lower);
        assert!(s.smooth_fit_residual < 1e-8);
        for (&p, &v) in s.pis.iter().zip(&s.values) {
            assert!(v <= LossModel::CrossEntropy.g(p) + 1e-14);
            assert!(v >= 0.0);
        }
    }

    #[test]
    fn above_threshold_has_no_interior_solution() {
        // With eta = 1 an interior solution needs c < 1/8.
        let r = solve_infinite_horizon(1.0, &LossModel::CrossEntropy, 0.2, 100);
        assert!(matches!(r, Err(Error::NoInteriorSolution(_))));
        assert!(solve_infinite_horizon(1.0, &LossModel::Classic { a1: 1.0, a2: 1.0 }, 0.1, 100).is_err());
    }
}
