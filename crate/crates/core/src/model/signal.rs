//! Parametric signal `h(t, j, rho) = (j - 1/2)(lambda0 + lambda1 rho)` and the
//! volatility it induces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtering::VolatilityCurve;
use crate::model::measure::StoppedMeasurePair;
use crate::model::mollifier::Mollifier;

/// Floor applied to the volatility before it enters any solver.
pub const VOLATILITY_FLOOR: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalModel {
    pub lambda0: f64,
    pub lambda1: f64,
}

impl SignalModel {
    pub fn new(lambda0: f64, lambda1: f64) -> Result<Self> {
        let s = SignalModel { lambda0, lambda1 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda0.is_finite() && self.lambda0 > 0.0) {
            return Err(Error::Config(format!(
                "signal.lambda0 must be positive, got {}",
                self.lambda0
            )));
        }
        if !(self.lambda1.is_finite() && self.lambda1 > -self.lambda0) {
            return Err(Error::Config(format!(
                "signal.lambda1 must exceed -lambda0, got {}",
                self.lambda1
            )));
        }
        Ok(())
    }

    /// `lambda0 + lambda1 (F0 + F1)` without the floor.
    pub fn raw_volatility(&self, f0: f64, f1: f64) -> f64 {
        self.lambda0 + self.lambda1 * (f0 + f1)
    }

    /// Volatility with the floor applied.
    pub fn volatility_from_fractions(&self, f0: f64, f1: f64) -> f64 {
        self.raw_volatility(f0, f1).max(VOLATILITY_FLOOR)
    }

    /// Lower bound `lambda0 ∧ (lambda0 + lambda1)` on the volatility used by the
    /// standing non-degeneracy condition.
    pub fn lower_bound(&self) -> f64 {
        self.lambda0.min(self.lambda0 + self.lambda1)
    }

    /// Upper bound `lambda0 + 2 max(lambda1, 0)`.
    pub fn upper_bound(&self) -> f64 {
        self.lambda0 + 2.0 * self.lambda1.max(0.0)
    }

    /// Smallest raw volatility over all fractions `F0 + F1 ∈ [0, 2]`.
    pub fn worst_case_lower_bound(&self) -> f64 {
        self.lambda0 + 2.0 * self.lambda1.min(0.0)
    }

    /// Floored volatility at time `t` under the population measure.
    pub fn volatility(&self, measure: &StoppedMeasurePair, mollifier: &Mollifier, t: f64) -> Result<f64> {
        let f0 = mollifier.fraction(measure, 0, t)?;
        let f1 = mollifier.fraction(measure, 1, t)?;
        Ok(self.volatility_from_fractions(f0, f1))
    }

    /// Volatility sampled at every node of the measure's time grid.
    pub fn volatility_curve(&self, measure: &StoppedMeasurePair, mollifier: &Mollifier) -> Result<VolatilityCurve> {
        let values = measure
            .times()
            .iter()
            .map(|&t| self.volatility(measure, mollifier, t))
            .collect::<Result<Vec<_>>>()?;
        VolatilityCurve::new(measure.times().to_vec(), values)
    }
}

/// Free-function form of [`SignalModel::volatility`].
pub fn volatility(signal: &SignalModel, measure: &StoppedMeasurePair, mollifier: &Mollifier, t: f64) -> Result<f64> {
    signal.volatility(measure, mollifier, t)
}
