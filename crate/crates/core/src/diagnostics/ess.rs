use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::ChainTrace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssReport {
    pub per_coordinate: Vec<f64>,
    /// Set for coordinates that never move; their ESS is reported as `T`.
    pub degenerate: Vec<bool>,
    pub draws: usize,
}

/// Per-coordinate effective sample size with Geyer's initial positive and
/// monotone sequence truncation. Values are capped at the number of draws.
pub fn ess(trace: &ChainTrace, burn_in: usize) -> Result<EssReport> {
    let draws = trace.len().saturating_sub(burn_in);
    if draws == 0 {
        return Err(Error::invalid("trace", "no states left after burn-in"));
    }
    let mut per_coordinate = Vec::with_capacity(trace.dim());
    let mut degenerate = Vec::with_capacity(trace.dim());
    for j in 0..trace.dim() {
        let x: Vec<f64> = trace.states().skip(burn_in).map(|s| s[j]).collect();
        match series_ess(&x) {
            Some(v) => {
                per_coordinate.push(v);
                degenerate.push(false);
            }
            None => {
                per_coordinate.push(draws as f64);
                degenerate.push(true);
            }
        }
    }
    Ok(EssReport {
        per_coordinate,
        degenerate,
        draws,
    })
}

/// `None` for a constant series.
pub(crate) fn series_ess(x: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 {
        return None;
    }
    let rho = autocorrelation(x)?;
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut m = 0;
    while 2 * m + 1 < n {
        let pair = rho[2 * m] + rho[2 * m + 1];
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(prev);
        sum += pair;
        prev = pair;
        m += 1;
    }
    let tau = (2.0 * sum - 1.0).max(1.0 / n as f64);
    Some((n as f64 / tau).min(n as f64))
}

/// Biased autocorrelation `ρ_k` via zero-padded FFT.
fn autocorrelation(x: &[f64]) -> Option<Vec<f64>> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    if !(var > 0.0) || var <= 1e-300 {
        return None;
    }
    let len = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = x
        .iter()
        .map(|v| Complex::new(v - mean, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(len)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(len).process(&mut buf);
    buf.iter_mut().for_each(|c| *c = Complex::new(c.norm_sqr(), 0.0));
    planner.plan_fft_inverse(len).process(&mut buf);
    let c0 = buf[0].re;
    Some(buf[..n].iter().map(|c| c.re / c0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn autocorrelation_matches_direct_sum() {
        let x: Vec<f64> = (0..200).map(|i| ((i * 37 % 101) as f64).sin()).collect();
        let rho = autocorrelation(&x).unwrap();
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let c0: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
        for k in [1, 5, 17] {
            let ck: f64 = (0..x.len() - k).map(|i| (x[i] - mean) * (x[i + k] - mean)).sum();
            assert!((rho[k] - ck / c0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_series_is_degenerate() {
        assert_eq!(series_ess(&[2.0; 50]), None);
        let tr = ChainTrace::from_states(1, vec![1.0; 30]).unwrap();
        let e = ess(&tr, 0).unwrap();
        assert_eq!(e.per_coordinate, vec![30.0]);
        assert_eq!(e.degenerate, vec![true]);
    }
}
