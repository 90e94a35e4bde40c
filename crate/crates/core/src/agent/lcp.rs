//! One implicit step of an obstacle problem as a discrete complementarity
//! problem, solved by policy iteration.

use super::tridiag::solve_tridiagonal;

/// Reusable buffers for [`obstacle_step`].
pub(crate) struct StepWork {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    scratch: Vec<f64>,
    stop: Vec<bool>,
}

impl StepWork {
    pub(crate) fn new(m: usize) -> Self {
        StepWork {
            lower: vec![0.0; m],
            diag: vec![0.0; m],
            upper: vec![0.0; m],
            scratch: vec![0.0; m],
            stop: vec![false; m],
        }
    }
}

/// Upper bound on policy iterations; the active set of an M-matrix problem
/// settles long before this.
const MAX_POLICY_ITERATIONS: usize = 200;

/// Finds `v` with `max(v - obstacle, M v - rhs) = 0` componentwise, where `M`
/// is the tridiagonal M-matrix `(lower, diag, upper)`.
///
/// Starts from the projection `min(M^{-1} rhs, obstacle)` and alternates
/// between picking, per node, the active branch of the max and solving the
/// resulting linear system. Returns the number of policy updates.
pub(crate) fn obstacle_step(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
    obstacle: &[f64],
    v: &mut [f64],
    work: &mut StepWork,
) -> usize {
    let m = diag.len();
    v.copy_from_slice(rhs);
    solve_tridiagonal(lower, diag, upper, v, &mut work.scratch);
    for (x, o) in v.iter_mut().zip(obstacle) {
        *x = x.min(*o);
    }
    work.stop.iter_mut().for_each(|s| *s = false);
    for iteration in 0..MAX_POLICY_ITERATIONS {
        let mut changed = false;
        for j in 0..m {
            let mut mv = diag[j] * v[j];
            if j > 0 {
                mv += lower[j] * v[j - 1];
            }
            if j + 1 < m {
                mv += upper[j] * v[j + 1];
            }
            let s = v[j] - obstacle[j] >= mv - rhs[j];
            changed |= s != work.stop[j];
            work.stop[j] = s;
        }
        if !changed && iteration > 0 {
            return iteration;
        }
        for j in 0..m {
            if work.stop[j] {
                work.lower[j] = 0.0;
                work.diag[j] = 1.0;
                work.upper[j] = 0.0;
                v[j] = obstacle[j];
            } else {
                work.lower[j] = lower[j];
                work.diag[j] = diag[j];
                work.upper[j] = upper[j];
                v[j] = rhs[j];
            }
        }
        solve_tridiagonal(&work.lower, &work.diag, &work.upper, v, &mut work.scratch);
    }
    log::warn!("policy iteration did not settle in {MAX_POLICY_ITERATIONS} updates");
    MAX_POLICY_ITERATIONS
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn satisfies_complementarity() {
        let m = 60;
        let h = 1.0 / (m + 1) as f64;
        let a = 0.05 / (h * h);
        let lower = vec![-a; m];
        let upper = vec![-a; m];
        let diag = vec![1.0 + 2.0 * a; m];
        let obstacle: Vec<f64> = (1..=m)
            .map(|j| {
                let x = j as f64 * h;
                (x * (1.0 - x)).min(0.2 * x)
            })
            .collect();
        let rhs: Vec<f64> = obstacle.iter().map(|o| o + 0.02).collect();
        let mut v = vec![0.0; m];
        let mut work = StepWork::new(m);
        obstacle_step(&lower, &diag, &upper, &rhs, &obstacle, &mut v, &mut work);
        for j in 0..m {
            let mut mv = diag[j] * v[j];
            if j > 0 {
                mv += lower[j] * v[j - 1];
            }
            if j + 1 < m {
                mv += upper[j] * v[j + 1];
            }
            assert!(v[j] <= obstacle[j] + 1e-12);
            assert!(mv <= rhs[j] + 1e-10);
            assert!(((obstacle[j] - v[j]) * (rhs[j] - mv)).abs() < 1e-10);
        }
    }
}
