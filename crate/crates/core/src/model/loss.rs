//! Terminal penalties `g` derived from a loss function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The penalty `g(pi)` paid when the agent stops with posterior `pi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", content = "params", rename_all = "snake_case")]
pub enum LossModel {
    /// `g(pi) = -pi log pi - (1 - pi) log(1 - pi)`.
    CrossEntropy,
    /// `g(pi) = beta pi (1 - pi)`; `beta = 2` is the L1 loss and `beta = 1` the L2 loss.
    ScaledQuadratic { beta: f64 },
    /// Hard-classification penalty `g(pi) = a1 pi  min  a2 (1 - pi)`.
    Classic { a1: f64, a2: f64 },
}

/// Value, slope and operator image of the penalty at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossEval {
    pub g: f64,
    /// `g'(pi)`; infinite at the endpoints for the cross-entropy penalty.
    pub g_prime: f64,
    /// `(A g)(pi) = pi^2 (1 - pi)^2 g''(pi) / 2`.
    pub ag: f64,
}

fn neg_xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

impl LossModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LossModel::CrossEntropy => Ok(()),
            LossModel::ScaledQuadratic { beta } => {
                if beta.is_finite() && beta > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!("loss.params.beta must be positive, got {beta}")))
                }
            }
            LossModel::Classic { a1, a2 } => {
                if a1.is_finite() && a1 > 0.0 && a2.is_finite() && a2 > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!(
                        "loss.params.a1 and loss.params.a2 must be positive, got {a1}, {a2}"
                    )))
                }
            }
        }
    }

    pub fn is_smooth(&self) -> bool {
        !matches!(self, LossModel::Classic { .. })
    }

    /// True when `g(pi) = g(1 - pi)`.
    pub fn is_symmetric(&self) -> bool {
        match *self {
            LossModel::Classic { a1, a2 } => a1 == a2,
            _ => true,
        }
    }

    /// Point separating the two stopping regions: `1/2`, or the kink for the classic penalty.
    pub fn center(&self) -> f64 {
        match *self {
            LossModel::Classic { a1, a2 } => a2 / (a1 + a2),
            _ => 0.5,
        }
    }

    /// `g(pi)`, with `g(0) = g(1) = 0` returned exactly. No range check.
    #[inline]
    pub fn g(&self, pi: f64) -> f64 {
        if pi <= 0.0 || pi >= 1.0 {
            return 0.0;
        }
        match *self {
            LossModel::CrossEntropy => neg_xlogx(pi) + neg_xlogx(1.0 - pi),
            LossModel::ScaledQuadratic { beta } => beta * pi * (1.0 - pi),
            LossModel::Classic { a1, a2 } => (a1 * pi).min(a2 * (1.0 - pi)),
        }
    }

    /// `(A g)(pi)`; zero for the classic penalty away from its kink. No range check.
    #[inline]
    pub fn ag(&self, pi: f64) -> f64 {
        let q = pi * (1.0 - pi);
        match *self {
            LossModel::CrossEntropy => -0.5 * q,
            LossModel::ScaledQuadratic { beta } => -beta * q * q,
            LossModel::Classic { .. } => 0.0,
        }
    }

    /// `d/dpi (A g)(pi)`, used for the quasiconvexity check.
    pub fn ag_prime(&self, pi: f64) -> f64 {
        match *self {
            LossModel::CrossEntropy => pi - 0.5,
            LossModel::ScaledQuadratic { beta } => -2.0 * beta * pi * (2.0 * pi * pi - 3.0 * pi + 1.0),
            LossModel::Classic { .. } => 0.0,
        }
    }

    /// `g''(pi)` for smooth penalties; zero for the classic penalty away from the kink.
    pub fn g_second(&self, pi: f64) -> f64 {
        match *self {
            LossModel::CrossEntropy => -1.0 / (pi * (1.0 - pi)),
            LossModel::ScaledQuadratic { beta } => -2.0 * beta,
            LossModel::Classic { .. } => 0.0,
        }
    }

    fn g_prime_unchecked(&self, pi: f64) -> f64 {
        match *self {
            LossModel::CrossEntropy => {
                if pi <= 0.0 {
                    f64::INFINITY
                } else if pi >= 1.0 {
                    f64::NEG_INFINITY
                } else {
                    (1.0 - pi).ln() - pi.ln()
                }
            }
            LossModel::ScaledQuadratic { beta } => beta * (1.0 - 2.0 * pi),
            LossModel::Classic { a1, a2 } => {
                if pi < self.center() {
                    a1
                } else {
                    -a2
                }
            }
        }
    }

    /// Evaluates `g`, `g'` and `A g` at `pi`.
    pub fn eval(&self, pi: f64) -> Result<LossEval> {
        if !(0.0..=1.0).contains(&pi) {
            return Err(Error::Domain(format!("pi = {pi} outside [0, 1]")));
        }
        if let LossModel::Classic { a1, a2 } = *self {
            if a1 * pi == a2 * (1.0 - pi) {
                return Err(Error::NonDifferentiable(pi));
            }
        }
        Ok(LossEval {
            g: self.g(pi),
            g_prime: self.g_prime_unchecked(pi),
            ag: self.ag(pi),
        })
    }

    /// Largest value of `g` on `[0, 1]`.
    pub fn sup_norm(&self) -> f64 {
        match *self {
            LossModel::CrossEntropy => std::f64::consts::LN_2,
            LossModel::ScaledQuadratic { beta } => 0.25 * beta,
            LossModel::Classic { a1, a2 } => a1 * a2 / (a1 + a2),
        }
    }
}

/// Free-function form of [`LossModel::eval`].
pub fn eval_loss(loss: &LossModel, pi: f64) -> Result<LossEval> {
    loss.eval(pi)
}
