//! Smoothing kernel for the population fractions.

use crate::error::{Error, Result};
use crate::model::measure::StoppedMeasurePair;

/// Four-point Gauss-Legendre rule on `[-1, 1]`, exact for degree 7.
const GL_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

pub(crate) fn gauss_legendre<F: Fn(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL_NODES
        .iter()
        .zip(GL_WEIGHTS.iter())
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Polynomial bump `k(u) ∝ (u (w - u))^3` supported on `[0, w]`, i.e. on the
/// recent past of the evaluation time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mollifier {
    pub width: f64,
    norm: f64,
}

impl Mollifier {
    pub fn new(width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::Config(format!("mollifier.width must be positive, got {width}")));
        }
        let raw = |u: f64| (u * (width - u)).powi(3);
        let mass = gauss_legendre(0.0, width, raw);
        Ok(Mollifier {
            width,
            norm: 1.0 / mass,
        })
    }

    /// Kernel density at lag `u`; zero outside `[0, w]`.
    pub fn density(&self, u: f64) -> f64 {
        if u <= 0.0 || u >= self.width {
            0.0
        } else {
            self.norm * (u * (self.width - u)).powi(3)
        }
    }

    /// `F^j(t) = ∫ mu^j[0, s] phi(t - s) ds`, evaluated exactly: the integrand is
    /// polynomial between the CDF breakpoints.
    pub fn fraction(&self, measure: &StoppedMeasurePair, j: u8, t: f64) -> Result<f64> {
        let horizon = measure.horizon();
        if !(0.0..=horizon).contains(&t) || t.is_nan() {
            return Err(Error::Domain(format!("t = {t} outside [0, {horizon}]")));
        }
        let cdf = measure.component(j);
        let times = measure.times();
        let mut cuts = vec![0.0, self.width];
        if t > 0.0 && t < self.width {
            cuts.push(t);
        }
        for &tk in times {
            let u = t - tk;
            if u > 0.0 && u < self.width {
                cuts.push(u);
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut total = 0.0;
        for pair in cuts.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b - a <= 0.0 {
                continue;
            }
            // Lags beyond t look at s < 0, where no agent has stopped.
            if a >= t {
                continue;
            }
            total += gauss_legendre(a, b, |u| measure.interpolate(cdf, t - u) * self.density(u));
        }
        Ok(total.clamp(0.0, 1.0))
    }
}

/// Free-function form of [`Mollifier::fraction`].
pub fn mollified_fraction(measure: &StoppedMeasurePair, mollifier: &Mollifier, j: u8, t: f64) -> Result<f64> {
    mollifier.fraction(measure, j, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_has_unit_mass_and_known_normalizer() {
        let m = Mollifier::new(0.5).unwrap();
        let n = 200_000;
        let h = m.width / n as f64;
        let mass: f64 = (0..n).map(|i| m.density((i as f64 + 0.5) * h) * h).sum();
        assert!((mass - 1.0).abs() < 1e-8);
        // ∫ (u(w-u))^3 du = w^7 / 140
        assert!((m.norm - 140.0 / 0.5f64.powi(7)).abs() / m.norm < 1e-12);
        assert_eq!(m.density(-0.1), 0.0);
        assert_eq!(m.density(0.6), 0.0);
    }

    #[test]
    fn mass_at_zero_gives_one_after_width() {
        let mu = StoppedMeasurePair::mass_at_zero(5.0, 100).unwrap();
        let m = Mollifier::new(0.5).unwrap();
        for &t in &[0.5, 1.0, 2.5, 5.0] {
            assert!((m.fraction(&mu, 0, t).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(m.fraction(&mu, 1, 0.25).unwrap() < 1.0);
    }

    #[test]
    fn mass_at_horizon_gives_zero_before_horizon_minus_width() {
        let mu = StoppedMeasurePair::mass_at_horizon(5.0, 100).unwrap();
        let m = Mollifier::new(0.5).unwrap();
        for &t in &[0.0, 1.0, 4.0, 4.5] {
            assert_eq!(m.fraction(&mu, 1, t).unwrap(), 0.0);
        }
        assert!(m.fraction(&mu, 1, 5.0).unwrap() > 0.0);
    }

    #[test]
    fn uniform_cdf_matches_dense_quadrature() {
        let mu = StoppedMeasurePair::uniform(5.0, 100).unwrap();
        let m = Mollifier::new(0.5).unwrap();
        let value = m.fraction(&mu, 0, 2.5).unwrap();
        // dense midpoint oracle with 10^4 nodes on the exact CDF s / T
        let n = 10_000;
        let h = m.width / n as f64;
        let oracle: f64 = (0..n)
            .map(|i| {
                let u = (i as f64 + 0.5) * h;
                (2.5 - u) / 5.0 * m.density(u) * h
            })
            .sum();
        assert!((2.0 / 5.0..=2.5 / 5.0).contains(&value));
        assert!((value - oracle).abs() < 1e-8, "{value} vs {oracle}");
    }

    #[test]
    fn outside_horizon_is_domain_error() {
        let mu = StoppedMeasurePair::uniform(5.0, 10).unwrap();
        let m = Mollifier::new(0.5).unwrap();
        assert!(m.fraction(&mu, 0, -0.01).is_err());
        assert!(m.fraction(&mu, 0, 5.01).is_err());
    }
}
