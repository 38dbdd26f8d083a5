use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed-width histogram with bin edges at integer multiples of `width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub width: f64,
    /// Index `k` of the first bin, covering `[k·width, (k+1)·width)`.
    pub first_bin: i64,
    pub counts: Vec<u64>,
}

/// A local maximum of the smoothed histogram (plateaus count once).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub center: f64,
    pub height: f64,
}

impl Histogram {
    pub fn from_values(values: &[f64], width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::invalid("width", "bin width must be positive"));
        }
        if values.is_empty() {
            return Err(Error::invalid("values", "nothing to bin"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values", "non-finite value"));
        }
        let idx: Vec<i64> = values.iter().map(|v| (v / width).floor() as i64).collect();
        let lo = *idx.iter().min().unwrap();
        let hi = *idx.iter().max().unwrap();
        let mut counts = vec![0u64; (hi - lo + 1) as usize];
        for k in idx {
            counts[(k - lo) as usize] += 1;
        }
        Ok(Self {
            width,
            first_bin: lo,
            counts,
        })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn edge(&self, i: usize) -> f64 {
        (self.first_bin + i as i64) as f64 * self.width
    }

    pub fn center(&self, i: usize) -> f64 {
        self.edge(i) + 0.5 * self.width
    }

    /// Centered moving average over `window` bins (odd), zero outside.
    pub fn smoothed(&self, window: usize) -> Vec<f64> {
        let half = (window.max(1) / 2) as isize;
        let n = self.counts.len() as isize;
        (0..n)
            .map(|i| {
                let s: u64 = (i - half..=i + half)
                    .filter(|&j| j >= 0 && j < n)
                    .map(|j| self.counts[j as usize])
                    .sum();
                s as f64 / (2 * half + 1) as f64
            })
            .collect()
    }

    /// Local maxima of the `window`-smoothed counts whose height is at least
    /// `floor` times the tallest smoothed bin.
    pub fn peaks(&self, window: usize, floor: f64) -> Vec<Peak> {
        let s = self.smoothed(window);
        let top = s.iter().copied().fold(0.0, f64::max);
        let mut peaks = Vec::new();
        let mut i = 0;
        while i < s.len() {
            let mut j = i;
            while j + 1 < s.len() && s[j + 1] == s[i] {
                j += 1;
            }
            let left = if i == 0 { 0.0 } else { s[i - 1] };
            let right = if j + 1 == s.len() { 0.0 } else { s[j + 1] };
            if s[i] > left && s[i] > right && s[i] >= floor * top {
                peaks.push(Peak {
                    center: 0.5 * (self.center(i) + self.center(j)),
                    height: s[i],
                });
            }
            i = j + 1;
        }
        peaks
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bins_are_aligned() {
        let h = Histogram::from_values(&[-0.3, -0.2, 0.1, 0.6], 0.25).unwrap();
        assert_eq!(h.first_bin, -2);
        assert_eq!(h.counts, vec![1, 1, 1, 0, 1]);
        assert_eq!(h.edge(0), -0.5);
        assert_eq!(h.total(), 4);
    }

    #[test]
    fn peak_detection_counts_plateaus_once() {
        let h = Histogram {
            width: 1.0,
            first_bin: 0,
            counts: vec![0, 5, 5, 0, 0, 9, 0],
        };
        let p = h.peaks(1, 0.0);
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].center, 2.0);
        assert_eq!(p[1].center, 5.5);
        // The small hump disappears below a 60% floor.
        assert_eq!(h.peaks(1, 0.6).len(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Histogram::from_values(&[], 1.0).is_err());
        assert!(Histogram::from_values(&[1.0], 0.0).is_err());
        assert!(Histogram::from_values(&[f64::NAN], 1.0).is_err());
    }
}
