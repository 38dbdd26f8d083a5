//! One-dimensional isoperimetry for quasi-concave densities on `[0, A]`:
//! `π(S₃) ≥ dist(S₁, S₂)/A · min(π(S₁), π(S₂))` for every three-way
//! partition.

use rand::Rng as _;
use serde_json::json;

use super::density::GridDensity;
use super::report::{LemmaReport, MarginTracker, LEMMA_TOL};
use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// Relative tolerance of the unimodality pre-check.
pub const UNIMODAL_TOL: f64 = 1e-9;

/// Largest rise after the peak or fall before it, relative to the peak
/// value, with the cell index where it happens. Zero for unimodal sequences.
pub fn unimodality_violation(values: &[f64]) -> (f64, usize) {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let peak = values.iter().position(|&v| v == top).unwrap_or(0);
    let scale = if top > 0.0 { top } else { 1.0 };
    let mut worst = (0.0, peak);
    for i in 0..values.len().saturating_sub(1) {
        let step = values[i + 1] - values[i];
        let v = if i < peak { -step } else { step };
        if v / scale > worst.0 {
            worst = (v / scale, i);
        }
    }
    worst
}

/// Random interval partitions, checked only after the density passes the
/// unimodality pre-check.
pub fn check_quasiconcave_isoperimetry(gd: &GridDensity, partitions: usize, seed: u64) -> Result<LemmaReport> {
    gd.line_axis()?;
    let (v, at) = unimodality_violation(gd.mass());
    if v > UNIMODAL_TOL {
        return Err(Error::Precondition(format!(
            "density is not unimodal: relative violation {v:.3e} at cell {at}"
        )));
    }
    quasiconcave_isoperimetry_unchecked(gd, partitions, seed)
}

/// The same sweep without the pre-check, so that detector sanity runs on
/// non-quasi-concave densities can report negative margins.
pub fn quasiconcave_isoperimetry_unchecked(gd: &GridDensity, partitions: usize, seed: u64) -> Result<LemmaReport> {
    let axis = gd.line_axis()?;
    let m = axis.points;
    if m < 3 {
        return Err(Error::Precondition("need at least three cells".into()));
    }
    if partitions == 0 {
        return Err(Error::invalid("partitions", "must be positive"));
    }
    let h = axis.width();
    let length = axis.hi - axis.lo;
    let mut prefix = vec![0.0; m + 1];
    for (i, p) in gd.mass().iter().enumerate() {
        prefix[i + 1] = prefix[i] + p;
    }
    let mut rng = rng::stream(seed, Stream::Lab);
    let mut t = MarginTracker::new("quasiconcave_isoperimetry", LEMMA_TOL);
    for _ in 0..partitions {
        let (cuts, labels) = random_partition(&mut rng, m);
        let mut mass = [0.0; 3];
        for (s, &label) in labels.iter().enumerate() {
            mass[label] += prefix[cuts[s + 1]] - prefix[cuts[s]];
        }
        // Cells strictly between a label-0 and a label-1 segment.
        let mut gap = usize::MAX;
        for (s, &ls) in labels.iter().enumerate() {
            for (r, &lr) in labels.iter().enumerate().skip(s + 1) {
                if (ls, lr) == (0, 1) || (ls, lr) == (1, 0) {
                    gap = gap.min(cuts[r] - cuts[s + 1]);
                }
            }
        }
        let dist = gap as f64 * h;
        let margin = mass[2] - dist / length * mass[0].min(mass[1]);
        t.record(margin, || json!({ "cuts": cuts, "labels": labels, "mass": mass, "dist": dist }));
    }
    t.finish(Some(seed), Some(gd.grid().clone()))
}

/// Segment boundaries `0 = c₀ < … < c_k = m` and a label in {0, 1, 2} per
/// segment, with labels 0 and 1 both present.
fn random_partition(rng: &mut rng::Rng, m: usize) -> (Vec<usize>, Vec<usize>) {
    let segments = rng.random_range(2..=7usize).min(m);
    let mut cuts: Vec<usize> = Vec::with_capacity(segments + 1);
    while cuts.len() < segments - 1 {
        let c = rng.random_range(1..m);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.push(0);
    cuts.push(m);
    cuts.sort_unstable();
    loop {
        let labels: Vec<usize> = (0..segments).map(|_| rng.random_range(0..3usize)).collect();
        if labels.contains(&0) && labels.contains(&1) {
            return (cuts, labels);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Axis, Grid};

    fn on_unit(m: usize, f: impl Fn(f64) -> f64) -> GridDensity {
        GridDensity::from_log_density(Grid::line(Axis::new(0.0, 1.0, m).unwrap()), |x| f(x[0])).unwrap()
    }

    #[test]
    fn unimodality_detector() {
        assert_eq!(unimodality_violation(&[1.0, 2.0, 2.0, 1.0]).0, 0.0);
        assert_eq!(unimodality_violation(&[3.0, 2.0, 1.0]).0, 0.0);
        let (v, at) = unimodality_violation(&[1.0, 3.0, 1.0, 2.0, 0.5]);
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(at, 2);
    }

    #[test]
    fn uniform_and_triangle_pass() {
        let u = on_unit(500, |_| 0.0);
        let r = check_quasiconcave_isoperimetry(&u, 2000, 1).unwrap();
        assert!(r.passed, "{r:?}");
        let tri = on_unit(1000, |x| (1.0 - (2.0 * x - 1.0).abs()).max(1e-300).ln());
        let r = check_quasiconcave_isoperimetry(&tri, 10_000, 2).unwrap();
        assert!(r.passed && r.worst_margin >= -1e-8, "{r:?}");
    }

    #[test]
    fn bimodal_is_rejected_then_fails_unchecked() {
        let b = on_unit(400, |x| {
            let a = -200.0 * (x - 0.15) * (x - 0.15);
            let c = -200.0 * (x - 0.85) * (x - 0.85);
            a.max(c)
        });
        assert!(matches!(check_quasiconcave_isoperimetry(&b, 100, 3), Err(Error::Precondition(_))));
        let r = quasiconcave_isoperimetry_unchecked(&b, 20_000, 3).unwrap();
        assert!(r.worst_margin < 0.0 && !r.passed);
        assert!(r.witness.get("cuts").is_some());
    }

    #[test]
    fn same_seed_same_report() {
        let u = on_unit(100, |x| -x);
        let a = check_quasiconcave_isoperimetry(&u, 500, 9).unwrap();
        let b = check_quasiconcave_isoperimetry(&u, 500, 9).unwrap();
        assert_eq!(a, b);
    }
}
