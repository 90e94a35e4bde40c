use crate::agent::surface::locate;
use crate::agent::Boundaries;
use crate::error::{Error, Result};

/// Boundaries in log-likelihood coordinates: `m = logit(b)`, `M = logit(B)`.
///
/// Slices with an empty continuation region have `m = M`. A boundary at
/// `pi = 0` or `pi = 1` maps to an infinite value, which never triggers a stop.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformedBoundaries {
    pub times: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

fn logit_extended(p: f64) -> f64 {
    if p <= 0.0 {
        f64::NEG_INFINITY
    } else if p >= 1.0 {
        f64::INFINITY
    } else {
        (p / (1.0 - p)).ln()
    }
}

impl TransformedBoundaries {
    /// Transforms boundaries, first replacing a flagged terminal slice by its
    /// left neighbour.
    pub fn from_boundaries(b: &Boundaries) -> Self {
        let held = b.held_at_horizon();
        TransformedBoundaries {
            lower: held.lower.iter().map(|&p| logit_extended(p)).collect(),
            upper: held.upper.iter().map(|&p| logit_extended(p)).collect(),
            times: held.times,
        }
    }

    pub fn new(times: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || lower.len() != times.len() || upper.len() != times.len() {
            return Err(Error::GridMismatch("boundary arrays must match the time grid".into()));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(m, mm)| m > mm || m.is_nan() || mm.is_nan())
        {
            return Err(Error::Domain("lower boundary above upper boundary".into()));
        }
        Ok(TransformedBoundaries { times, lower, upper })
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// `(m(t), M(t))` by linear interpolation.
    pub fn at(&self, t: f64) -> (f64, f64) {
        let (k, w) = locate(&self.times, t);
        let lerp = |y: &[f64]| {
            if w == 0.0 {
                y[k]
            } else if w == 1.0 {
                y[k + 1]
            } else {
                (1.0 - w) * y[k] + w * y[k + 1]
            }
        };
        (lerp(&self.lower), lerp(&self.upper))
    }

    /// The same boundaries moved by `(delta_lower, delta_upper)` in `l`.
    pub fn shifted(&self, delta_lower: f64, delta_upper: f64) -> Self {
        TransformedBoundaries {
            times: self.times.clone(),
            lower: self.lower.iter().map(|m| m + delta_lower).collect(),
            upper: self.upper.iter().map(|m| m + delta_upper).collect(),
        }
    }
}
