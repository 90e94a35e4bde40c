use mfg_seqtest::agent::solve_value;
use mfg_seqtest::filtering::VolatilityCurve;
use mfg_seqtest::io::*;
use mfg_seqtest::model::{GridConfig, LossModel, StoppedMeasurePair};

fn surface() -> mfg_seqtest::agent::ValueSurface {
    let eta = VolatilityCurve::from_fn(2.0, 20, |t| 1.0 - 0.1 * t).unwrap();
    solve_value(
        &eta,
        &LossModel::CrossEntropy,
        0.1,
        2.0,
        &GridConfig {
            n_space: 60,
            n_time: 40,
        },
    )
    .unwrap()
}

#[test]
fn boundaries_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("boundaries.csv");
    let s = surface();
    write_boundaries_csv(&path, &s.boundaries).unwrap();
    let back = read_boundaries_csv(&path).unwrap();
    assert_eq!(back, s.boundaries);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t,b,B\n"));
}

#[test]
fn cdfs_and_value_slice_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mu = StoppedMeasurePair::from_fn(2.0, 30, |t| (t / 2.0).powf(0.7)).unwrap();
    let p = dir.path().join("cdfs.csv");
    write_cdfs_csv(&p, &mu).unwrap();
    assert_eq!(read_cdfs_csv(&p).unwrap(), mu);

    let s = surface();
    let p = dir.path().join("value_t0.csv");
    write_value_slice_csv(&p, &s, 0).unwrap();
    let (pis, v) = read_value_slice_csv(&p).unwrap();
    assert_eq!(pis, s.pis);
    assert_eq!(v, s.row(0));
}

#[test]
fn surface_export_shape() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("surface.csv");
    let s = surface();
    write_surface_csv(&p, &s, 10).unwrap();
    let text = std::fs::read_to_string(&p).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,pi,V,stop"));
    // Time rows 0, 10, 20, 30, 40 and space nodes 0, 10, ..., 60.
    assert_eq!(lines.count(), 5 * 7);
}

#[test]
fn malformed_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.csv");
    std::fs::write(&p, "t,F0,F1\n0,0.5,0.2\n1,0.4,0.3\n2,1,1\n").unwrap();
    assert!(read_cdfs_csv(&p).is_err());
    std::fs::write(&p, "x,y\n0,1\n").unwrap();
    assert!(read_boundaries_csv(&p).is_err());
}
