//! Belief dynamics: posterior probability, log-likelihood ratio, the clock
//! `alpha(t) = ∫ eta^2` and conditional path sampling.

pub mod curve;
pub mod paths;

pub use curve::VolatilityCurve;
pub use paths::{sample_conditional_paths, sample_unconditional_paths, PathEnsemble, StepGrid};

use crate::error::{Error, Result};

/// Log-likelihood values are clamped to this range before exponentiation.
pub const LOG_LIKELIHOOD_CLAMP: f64 = 709.0;

/// `log(pi / (1 - pi))`.
pub fn logit(pi: f64) -> Result<f64> {
    if !(pi > 0.0 && pi < 1.0) {
        return Err(Error::Domain(format!("logit undefined at pi = {pi}")));
    }
    Ok((pi / (1.0 - pi)).ln())
}

/// `1 / (1 + e^{-l})`, evaluated without overflow for any finite `l`.
#[inline]
pub fn sigmoid(l: f64) -> f64 {
    let l = l.clamp(-LOG_LIKELIHOOD_CLAMP, LOG_LIKELIHOOD_CLAMP);
    if l >= 0.0 {
        1.0 / (1.0 + (-l).exp())
    } else {
        let e = l.exp();
        e / (1.0 + e)
    }
}

/// Mean and variance of `L_t` given `theta` and `L_0`.
pub fn conditional_moments(eta: &VolatilityCurve, l0: f64, t: f64, theta: u8) -> Result<(f64, f64)> {
    let alpha = eta.clock(t)?;
    let sign = if theta == 1 { 1.0 } else { -1.0 };
    Ok((l0 + sign * 0.5 * alpha, alpha))
}
