//! Numerical checks of the standing assumptions on the penalty and signal.

use serde::Serialize;

use crate::model::loss::LossModel;
use crate::model::signal::SignalModel;

const CHECK_GRID: usize = 1000;

/// Outcome of [`check_assumptions`]. Violations are reported, never fatal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub loss: LossModel,
    /// `lambda0 ∧ (lambda0 + lambda1)`.
    pub eta_lower: f64,
    /// `lambda0 + 2 max(lambda1, 0)`.
    pub eta_upper: f64,
    /// `lambda0 + 2 min(lambda1, 0)`: the smallest volatility reachable when
    /// both fractions reach one.
    pub eta_worst_case: f64,
    /// Symmetry, concavity and zero endpoints on a grid (smooth penalties).
    pub g1: Option<bool>,
    /// `d/dpi (A g) < 0` on `(0, 1/2)` and `> 0` on `(1/2, 1)` on a grid.
    pub g2: Option<bool>,
    /// `(A g)(1/2) < -c / eta_lower^2`.
    pub g3: Option<bool>,
    /// Classic penalty with positive coefficients.
    pub c1: Option<bool>,
    /// Monotone decreasing volatility under the parametric signal, which needs
    /// `lambda1 <= 0`. It still has to hold for each measure actually used.
    pub c2_parametric: Option<bool>,
    pub violations: Vec<String>,
}

impl AssumptionReport {
    pub fn all_hold(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_assumptions(loss: &LossModel, signal: &SignalModel, c: f64) -> AssumptionReport {
    let eta_lower = signal.lower_bound();
    let mut report = AssumptionReport {
        loss: *loss,
        eta_lower,
        eta_upper: signal.upper_bound(),
        eta_worst_case: signal.worst_case_lower_bound(),
        g1: None,
        g2: None,
        g3: None,
        c1: None,
        c2_parametric: None,
        violations: Vec::new(),
    };
    if loss.is_smooth() {
        let n = CHECK_GRID;
        let mut g1 = loss.g(0.0) == 0.0 && loss.g(1.0) == 0.0;
        let mut g2 = true;
        for i in 1..n {
            let pi = i as f64 / n as f64;
            let mirror = (n - i) as f64 / n as f64;
            if (loss.g(pi) - loss.g(mirror)).abs() > 1e-12 || loss.g_second(pi) > 0.0 {
                g1 = false;
            }
            let slope = loss.ag_prime(pi);
            if (2 * i < n && slope >= 0.0) || (2 * i > n && slope <= 0.0) {
                g2 = false;
            }
        }
        let g3 = loss.ag(0.5) < -c / (eta_lower * eta_lower);
        for (name, ok) in [("G1", g1), ("G2", g2), ("G3", g3)] {
            if !ok {
                report.violations.push(name.to_string());
            }
        }
        report.g1 = Some(g1);
        report.g2 = Some(g2);
        report.g3 = Some(g3);
    } else {
        let c1 = loss.validate().is_ok();
        let c2 = signal.lambda1 <= 0.0;
        if !c1 {
            report.violations.push("C1".into());
        }
        if !c2 {
            report.violations.push("C2".into());
        }
        report.c1 = Some(c1);
        report.c2_parametric = Some(c2);
    }
    report
}
