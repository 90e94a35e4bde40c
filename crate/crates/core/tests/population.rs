use mfg_seqtest::agent::solve_value;
use mfg_seqtest::filtering::VolatilityCurve;
use mfg_seqtest::model::{GridConfig, LossModel, McConfig};
use mfg_seqtest::population::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

fn flat(horizon: f64, n: usize, m: f64, mm: f64) -> TransformedBoundaries {
    let times: Vec<f64> = (0..=n).map(|k| horizon * k as f64 / n as f64).collect();
    TransformedBoundaries::new(times, vec![m; n + 1], vec![mm; n + 1]).unwrap()
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn is_cdf(f: &[f64]) -> bool {
    f.windows(2).all(|w| w[0] <= w[1]) && f[0] >= 0.0 && *f.last().unwrap() == 1.0
}

/// `P(max_{s <= t} (mu s + W_s) >= a)` for `a > 0`.
fn first_passage_cdf(a: f64, mu: f64, t: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).unwrap();
    let s = t.sqrt();
    n.cdf((mu * t - a) / s) + (2.0 * mu * a).exp() * n.cdf((-a - mu * t) / s)
}

#[test]
fn start_on_the_boundary_stops_immediately() {
    let eta = VolatilityCurve::constant(1.0, 1.0, 10).unwrap();
    let b = flat(1.0, 20, 0.0, 0.0);
    let f = hitting_cdf_mc(&b, &eta, 0.0, 1, 500, 0.01, 1).unwrap();
    assert!(f.iter().all(|&x| x == 1.0));
}

#[test]
fn distant_boundaries_absorb_at_the_horizon() {
    let eta = VolatilityCurve::constant(1.0, 0.01, 10).unwrap();
    let times: Vec<f64> = (0..=10).map(|k| 0.001 * k as f64).collect();
    let lower: Vec<f64> = times.iter().map(|t| -20.0 - 100.0 * t).collect();
    let upper: Vec<f64> = times.iter().map(|t| 20.0 + 100.0 * t).collect();
    let b = TransformedBoundaries::new(times, lower, upper).unwrap();
    let f = hitting_cdf_mc(&b, &eta, 0.0, 1, 2000, 0.0005, 2).unwrap();
    assert!(f[..10].iter().all(|&x| x == 0.0));
    assert_eq!(f[10], 1.0);
}

#[test]
fn one_sided_passage_matches_closed_form() {
    let eta = VolatilityCurve::constant(1.0, 1.0, 10).unwrap();
    let n = 100_000;
    let a = 1.0;
    let up = flat(1.0, 20, f64::NEG_INFINITY, a);
    let down = flat(1.0, 20, -a, f64::INFINITY);
    let f_up = hitting_cdf_mc(&up, &eta, 0.0, 1, n, 0.01, 3).unwrap();
    let f_down = hitting_cdf_mc(&down, &eta, 0.0, 1, n, 0.01, 3).unwrap();
    for k in [5, 10, 15, 19] {
        let t = up.times[k];
        // theta = 1 drifts up at rate 1/2, so the lower barrier sees drift -1/2 in mirror image.
        for (f, mu) in [(&f_up, 0.5), (&f_down, -0.5)] {
            let p = first_passage_cdf(a, mu, t);
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((f[k] - p).abs() < 3.0 * se + 2e-3, "t {t}, mu {mu}: {} vs {p}", f[k]);
        }
        assert!(f_up[k] > f_down[k]);
    }
}

/// Exit time and side from a plain walk with four substeps per step and
/// the bridge correction against flat barriers.
fn oracle_exit(rng: &mut ChaCha8Rng, m: f64, mm: f64, drift: f64, dt: f64, horizon: f64) -> (f64, i8) {
    let mut l = 0.0;
    let mut t = 0.0;
    while t < horizon - 1e-12 {
        let next = l + drift * dt + dt.sqrt() * rng.sample::<f64, _>(StandardNormal);
        if next >= mm {
            return (t + dt, 1);
        }
        if next <= m {
            return (t + dt, -1);
        }
        let p_hi = (-2.0 * (mm - l) * (mm - next) / dt).exp();
        let p_lo = (-2.0 * (l - m) * (next - m) / dt).exp();
        let u: f64 = rng.random();
        if u < p_hi {
            return (t + dt, 1);
        }
        if u < p_hi + p_lo * (1.0 - p_hi) {
            return (t + dt, -1);
        }
        l = next;
        t += dt;
    }
    (horizon, 0)
}

#[test]
fn two_sided_exit_agrees_with_refined_oracle() {
    let eta = VolatilityCurve::constant(1.0, 1.0, 10).unwrap();
    let b = flat(1.0, 20, -1.0, 1.0);
    let n = 100_000;
    let f = hitting_cdf_mc(&b, &eta, 0.0, 1, n, 0.01, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let exits: Vec<(f64, i8)> = (0..n)
        .map(|_| oracle_exit(&mut rng, -1.0, 1.0, 0.5, 0.0025, 1.0))
        .collect();
    let ups = exits.iter().filter(|e| e.1 == 1).count() as f64 / n as f64;
    let downs = exits.iter().filter(|e| e.1 == -1).count() as f64 / n as f64;
    assert!(ups - downs > 3.0 * ((ups + downs) / n as f64).sqrt());
    for k in [5, 10, 15, 19] {
        let t = b.times[k];
        let p = exits.iter().filter(|e| e.1 != 0 && e.0 <= t + 1e-12).count() as f64 / n as f64;
        let se = (2.0 * p * (1.0 - p) / n as f64).sqrt();
        assert!((f[k] - p).abs() < 3.0 * se + 0.0025, "t {t}: {} vs {p}", f[k]);
    }
}

fn curved() -> (VolatilityCurve, TransformedBoundaries) {
    let eta = VolatilityCurve::from_fn(2.0, 50, |t| 1.0 - 0.2 * t).unwrap();
    let times: Vec<f64> = (0..=200).map(|k| 0.01 * k as f64).collect();
    let lower: Vec<f64> = times.iter().map(|t| -1.5 + 0.5 * t).collect();
    let upper: Vec<f64> = times.iter().map(|t| 1.2 - 0.4 * t).collect();
    (eta, TransformedBoundaries::new(times, lower, upper).unwrap())
}

#[test]
fn forward_equation_conserves_mass_and_matches_simulation() {
    let (eta, b) = curved();
    for theta in [0u8, 1] {
        let pde = hitting_cdf_pde(&b, &eta, 0.1, theta, 400, 2000).unwrap();
        assert!(pde.max_mass_error < 1e-6);
        assert!(is_cdf(&pde.cdf));
        let mc = hitting_cdf_mc(&b, &eta, 0.1, theta, 100_000, 0.001, 5).unwrap();
        assert!(is_cdf(&mc));
        assert!(sup(&mc, &pde.cdf) <= 0.01);
    }
}

#[test]
fn reflection_symmetry() {
    let (eta, b) = curved();
    let mirror = TransformedBoundaries::new(
        b.times.clone(),
        b.upper.iter().map(|x| -x).collect(),
        b.lower.iter().map(|x| -x).collect(),
    )
    .unwrap();
    let p1 = hitting_cdf_pde(&b, &eta, 0.0, 1, 300, 1000).unwrap();
    let p0 = hitting_cdf_pde(&mirror, &eta, 0.0, 0, 300, 1000).unwrap();
    assert!(sup(&p1.cdf, &p0.cdf) < 1e-12);
}

#[test]
fn perturbed_boundaries_converge() {
    let (eta, b) = curved();
    let base = hitting_cdf_pde(&b, &eta, 0.1, 1, 300, 1000).unwrap().cdf;
    let d: Vec<f64> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&e| {
            sup(
                &hitting_cdf_pde(&b.shifted(e, -e), &eta, 0.1, 1, 300, 1000).unwrap().cdf,
                &base,
            )
        })
        .collect();
    assert!(d[0] > d[1] && d[1] > d[2] && d[2] > 0.0, "{d:?}");
}

#[test]
fn response_measure_of_immediate_stopping_and_determinism() {
    let eta = VolatilityCurve::constant(1.0, 5.0, 10).unwrap();
    let g = GridConfig {
        n_space: 200,
        n_time: 100,
    };
    let mc = McConfig {
        paths: 2000,
        dt: 0.01,
        seed: 7,
    };
    let stop_all = solve_value(&eta, &LossModel::CrossEntropy, 1e3, 5.0, &g).unwrap();
    let r = response_measure(&stop_all, &eta, 0.5, &mc).unwrap();
    assert!(r.f0().iter().chain(r.f1()).all(|&x| x == 1.0));

    let s = solve_value(&eta, &LossModel::CrossEntropy, 0.1, 5.0, &g).unwrap();
    let a = response_measure(&s, &eta, 0.5, &mc).unwrap();
    let b = response_measure(&s, &eta, 0.5, &mc).unwrap();
    assert_eq!(a, b);
    assert!(is_cdf(a.f0()) && is_cdf(a.f1()));
}
