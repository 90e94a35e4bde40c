use mfg_seqtest::model::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_measure(rng: &mut ChaCha8Rng, horizon: f64, n: usize) -> StoppedMeasurePair {
    let mut draw = || {
        let mut incs: Vec<f64> = (0..n).map(|_| rng.random::<f64>().powi(3)).collect();
        let total: f64 = incs.iter().sum::<f64>() / rng.random_range(0.2..1.0);
        let mut acc = 0.0;
        let mut out = vec![0.0];
        for x in incs.iter_mut() {
            acc += *x / total;
            out.push(acc.min(1.0));
        }
        out
    };
    let (f0, f1) = (draw(), draw());
    let times: Vec<f64> = (0..=n).map(|k| horizon * k as f64 / n as f64).collect();
    StoppedMeasurePair::new(times, f0, f1).unwrap()
}

#[test]
fn mollified_fraction_is_monotone_in_time_on_random_measures() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mollifier = Mollifier::new(0.5).unwrap();
    for _ in 0..100 {
        let mu = random_measure(&mut rng, 5.0, 50);
        let mut times: Vec<f64> = (0..100).map(|_| rng.random_range(0.0..5.0)).collect();
        times.sort_by(f64::total_cmp);
        for j in [0u8, 1] {
            let mut prev = 0.0;
            for &t in &times {
                let f = mollified_fraction(&mu, &mollifier, j, t).unwrap();
                assert!((0.0..=1.0).contains(&f));
                assert!(f >= prev - 1e-12, "fraction decreased at t = {t}");
                prev = f;
            }
        }
    }
}

#[test]
fn volatility_stays_within_parametric_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mollifier = Mollifier::new(0.5).unwrap();
    for &(l0, l1) in &[(1.0, -0.5), (1.0, 1.0), (2.0, 0.3)] {
        let signal = SignalModel::new(l0, l1).unwrap();
        let hi = signal.upper_bound();
        let lo = signal.worst_case_lower_bound().max(VOLATILITY_FLOOR);
        for _ in 0..20 {
            let mu = random_measure(&mut rng, 5.0, 40);
            for k in 0..=50 {
                let eta = volatility(&signal, &mu, &mollifier, 0.1 * k as f64).unwrap();
                assert!(eta >= lo - 1e-12 && eta <= hi + 1e-12);
            }
        }
    }
}

#[test]
fn volatility_examples() {
    let mollifier = Mollifier::new(0.5).unwrap();
    let signal = SignalModel::new(1.0, 0.0).unwrap();
    let mu = StoppedMeasurePair::uniform(5.0, 10).unwrap();
    assert_eq!(volatility(&signal, &mu, &mollifier, 2.0).unwrap(), 1.0);
    assert_eq!(SignalModel::new(1.0, 1.0).unwrap().raw_volatility(1.0, 1.0), 3.0);
    assert_eq!(SignalModel::new(1.0, -0.5).unwrap().raw_volatility(1.0, 1.0), 0.0);
    let everyone_stopped = StoppedMeasurePair::mass_at_zero(5.0, 10).unwrap();
    let eta = volatility(&SignalModel::new(1.0, 1.0).unwrap(), &everyone_stopped, &mollifier, 1.0).unwrap();
    assert!((eta - 3.0).abs() < 1e-12);
}

#[test]
fn assumption_examples() {
    let ce = check_assumptions(&LossModel::CrossEntropy, &SignalModel::new(1.0, 0.0).unwrap(), 0.1);
    assert!(ce.all_hold());
    assert_eq!(ce.eta_lower, 1.0);
    let pre = check_assumptions(&LossModel::CrossEntropy, &SignalModel::new(1.0, -0.5).unwrap(), 0.1);
    assert_eq!(pre.g3, Some(false));
    assert_eq!(pre.violations, vec!["G3".to_string()]);
    // (A g)(1/2) = -1/8 < -c / h^2 exactly when h > sqrt(8c).
    let threshold = (8.0f64 * 0.1).sqrt();
    for h in [threshold - 0.01, threshold + 0.01] {
        let r = check_assumptions(&LossModel::CrossEntropy, &SignalModel::new(h, 0.0).unwrap(), 0.1);
        assert_eq!(r.g3, Some(h > threshold));
    }
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, serde_json::to_string_pretty(&ProblemConfig::default()).unwrap()).unwrap();
    let cfg = ProblemConfig::load(&path, &["signal.lambda1=-0.25".into(), "mc.seed=9".into()]).unwrap();
    assert_eq!(cfg.signal.lambda1, -0.25);
    assert_eq!(cfg.mc.seed, 9);
    let bad = ProblemConfig::load(&path, &["mc.dt=2".into()]);
    assert!(bad.is_err());
}
