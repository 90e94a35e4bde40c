use super::surface::{Boundaries, ValueSurface};

/// Lower crossing between stop node `s` and continuation node `s + 1`.
///
/// Near a smooth-fit boundary `g - V` grows quadratically, so `sqrt(g - V)`
/// is extrapolated linearly from the first two continuation nodes. Falls back
/// to linear interpolation of `g - V` at level `eps`.
fn refine(pis: &[f64], gap: &[f64], s: usize, inward: isize, eps: f64) -> f64 {
    let c1 = (s as isize + inward) as usize;
    let c2 = c1 as isize + inward;
    let (p_s, p_1) = (pis[s], pis[c1]);
    if c2 >= 0 && (c2 as usize) < pis.len() && gap[c2 as usize] > gap[c1] {
        let (r1, r2) = (gap[c1].sqrt(), gap[c2 as usize].sqrt());
        let p_2 = pis[c2 as usize];
        let root = p_1 - r1 * (p_2 - p_1) / (r2 - r1);
        let (lo, hi) = if p_s < p_1 { (p_s, p_1) } else { (p_1, p_s) };
        return root.clamp(lo, hi);
    }
    let w = ((eps - gap[s]) / (gap[c1] - gap[s])).clamp(0.0, 1.0);
    p_s + w * (p_1 - p_s)
}

/// Boundaries of one slice. `None` when the continuation region is empty.
pub(crate) fn slice_boundaries(pis: &[f64], gap: &[f64], center: f64, eps: f64) -> Option<(f64, f64)> {
    let n = pis.len();
    let start = (0..n)
        .filter(|&i| gap[i] > eps)
        .min_by(|&i, &j| (pis[i] - center).abs().total_cmp(&(pis[j] - center).abs()))?;
    let mut lo = start;
    while lo > 0 && gap[lo - 1] > eps {
        lo -= 1;
    }
    let mut hi = start;
    while hi + 1 < n && gap[hi + 1] > eps {
        hi += 1;
    }
    let b = if lo == 0 {
        pis[0]
    } else {
        refine(pis, gap, lo - 1, 1, eps)
    };
    let bb = if hi + 1 == n {
        pis[n - 1]
    } else {
        refine(pis, gap, hi + 1, -1, eps)
    };
    Some((b, bb))
}

/// Extracts `b(t)` and `B(t)` from the stop region `{g - V <= eps}` of each
/// time slice, walking outward from the continuation node closest to the
/// loss's center.
pub fn extract_boundaries(surface: &ValueSurface, eps: f64) -> Boundaries {
    let center = surface.loss.center();
    let g: Vec<f64> = surface.pis.iter().map(|&p| surface.loss.g(p)).collect();
    let mut gap = vec![0.0; g.len()];
    let n_t = surface.n_times();
    let mut out = Boundaries {
        times: surface.times.clone(),
        lower: Vec::with_capacity(n_t),
        upper: Vec::with_capacity(n_t),
        flagged: Vec::with_capacity(n_t),
    };
    for k in 0..n_t {
        for (x, (gi, v)) in gap.iter_mut().zip(g.iter().zip(surface.row(k))) {
            *x = gi - v;
        }
        match slice_boundaries(&surface.pis, &gap, center, eps) {
            Some((b, bb)) => {
                out.lower.push(b);
                out.upper.push(bb);
                out.flagged.push(false);
            }
            None => {
                out.lower.push(center);
                out.upper.push(center);
                out.flagged.push(true);
            }
        }
    }
    out
}

/// Number of maximal runs of stop nodes in a slice.
pub fn stop_runs(surface: &ValueSurface, k: usize) -> usize {
    let mut runs = 0;
    let mut prev = false;
    for i in 0..surface.n_space() {
        let s = surface.is_stop(k, i);
        if s && !prev {
            runs += 1;
        }
        prev = s;
    }
    runs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_gap_recovers_the_root() {
        let pis: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let root = 0.2037;
        let gap: Vec<f64> = pis
            .iter()
            .map(|&p| {
                if p <= root || p >= 1.0 - root {
                    0.0
                } else {
                    ((p - root) * (1.0 - root - p)).powi(2)
                }
            })
            .collect();
        let (b, bb) = slice_boundaries(&pis, &gap, 0.5, 1e-12).unwrap();
        assert!((b - root).abs() < 2e-3, "{b}");
        assert!((bb - (1.0 - root)).abs() < 2e-3, "{bb}");
        assert!(pis[20] <= b && b <= pis[21]);
    }

    #[test]
    fn empty_slice_is_none() {
        let pis = [0.0, 0.5, 1.0];
        assert_eq!(slice_boundaries(&pis, &[0.0; 3], 0.5, 1e-9), None);
    }
}
