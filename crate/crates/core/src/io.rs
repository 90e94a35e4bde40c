//! CSV export and import of boundaries, measures and value slices.
//!
//! Numbers are written with 17 significant digits so that a file round-trips
//! to the same `f64` and reruns produce identical bytes.

use std::path::Path;

use crate::agent::{Boundaries, ValueSurface};
use crate::error::{Error, Result};
use crate::model::StoppedMeasurePair;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Domain(format!("csv: {other:?}")),
    }
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a numeric CSV with exactly the given header, returning its columns.
fn read_columns(path: &Path, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let found: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if found != header {
        return Err(Error::Domain(format!(
            "{}: expected header {header:?}, found {found:?}",
            path.display()
        )));
    }
    let mut cols = vec![Vec::new(); header.len()];
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        for (col, field) in cols.iter_mut().zip(rec.iter()) {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("{}: bad number `{field}` on row {}", path.display(), line + 2)))?;
            col.push(v);
        }
    }
    Ok(cols)
}

/// `t,b,B`
pub fn write_boundaries_csv(path: &Path, b: &Boundaries) -> Result<()> {
    let rows = (0..b.len()).map(|k| vec![num(b.times[k]), num(b.lower[k]), num(b.upper[k])]);
    write_rows(path, &["t", "b", "B"], rows)
}

/// Reads `t,b,B`; slices with `b == B` are marked flagged.
pub fn read_boundaries_csv(path: &Path) -> Result<Boundaries> {
    let mut cols = read_columns(path, &["t", "b", "B"])?;
    let upper = cols.pop().unwrap();
    let lower = cols.pop().unwrap();
    let times = cols.pop().unwrap();
    if lower.iter().zip(&upper).any(|(b, bb)| b > bb || *b < 0.0 || *bb > 1.0) {
        return Err(Error::Domain(format!(
            "{}: boundaries out of order or range",
            path.display()
        )));
    }
    let flagged = lower.iter().zip(&upper).map(|(b, bb)| b == bb).collect();
    Ok(Boundaries {
        times,
        lower,
        upper,
        flagged,
    })
}

/// `t,F0,F1`
pub fn write_cdfs_csv(path: &Path, mu: &StoppedMeasurePair) -> Result<()> {
    let rows = (0..mu.times().len()).map(|k| vec![num(mu.times()[k]), num(mu.f0()[k]), num(mu.f1()[k])]);
    write_rows(path, &["t", "F0", "F1"], rows)
}

/// Reads `t,F0,F1`, checking the CDF invariants.
pub fn read_cdfs_csv(path: &Path) -> Result<StoppedMeasurePair> {
    let mut cols = read_columns(path, &["t", "F0", "F1"])?;
    let f1 = cols.pop().unwrap();
    let f0 = cols.pop().unwrap();
    StoppedMeasurePair::new(cols.pop().unwrap(), f0, f1)
}

/// `pi,V` for time slice `k`.
pub fn write_value_slice_csv(path: &Path, surface: &ValueSurface, k: usize) -> Result<()> {
    let row = surface.row(k);
    let rows = surface.pis.iter().zip(row).map(|(p, v)| vec![num(*p), num(*v)]);
    write_rows(path, &["pi", "V"], rows)
}

/// Reads `pi,V` into `(pis, values)`.
pub fn read_value_slice_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut cols = read_columns(path, &["pi", "V"])?;
    let v = cols.pop().unwrap();
    Ok((cols.pop().unwrap(), v))
}

/// Long format `t,pi,V,stop`, every `stride`-th node in each direction.
pub fn write_surface_csv(path: &Path, surface: &ValueSurface, stride: usize) -> Result<()> {
    let stride = stride.max(1);
    let mut ks: Vec<usize> = (0..surface.n_times()).step_by(stride).collect();
    if ks.last() != Some(&(surface.n_times() - 1)) {
        ks.push(surface.n_times() - 1);
    }
    let rows = ks.into_iter().flat_map(move |k| {
        (0..surface.n_space()).step_by(stride).map(move |i| {
            vec![
                num(surface.times[k]),
                num(surface.pis[i]),
                num(surface.value(k, i)),
                u8::from(surface.is_stop(k, i)).to_string(),
            ]
        })
    });
    write_rows(path, &["t", "pi", "V", "stop"], rows)
}
