//! Uniform deviation `sup_θ |P_n g_θ − P g_θ|` of the mixture log-likelihood
//! `g_θ(x) = log(½φ(x − θ) + ½φ(x + θ))` over a bounded parameter set.
//!
//! Writing `g_θ(x) = −(d/2)log 2π − ‖x‖²/2 − ‖θ‖²/2 + logcosh(θᵀx)`, the
//! constant and `θ`-only terms cancel, and the population side reduces to
//! `E logcosh(θᵀθ₀ + ‖θ‖Z)` plus `E‖X‖² = d + ‖θ₀‖²`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::{LemmaReport, MarginTracker};
use crate::error::{Error, Result};
use crate::mixture::{dot, logcosh, norm, sample_data, ContaminationSpec, MixtureSpec};
use crate::quadrature::{GaussianLine, DEFAULT_NODES};

/// Accepted range for the fitted log-log slope of deviation against `n`.
pub const SLOPE_RANGE: (f64, f64) = (-0.65, -0.35);
/// Fewest grid points per parameter axis.
pub const MIN_THETA_POINTS: usize = 50;

/// `[−A, A]` along `e₁` times the ball of radius `M` in the remaining
/// coordinates, sampled with `points` nodes per axis (endpoints included).
pub fn theta_grid(d: usize, a: f64, m: f64, points: usize) -> Result<Vec<Vec<f64>>> {
    if !(1..=3).contains(&d) {
        return Err(Error::Unsupported(format!("parameter grids need d ≤ 3, got {d}")));
    }
    if points < MIN_THETA_POINTS {
        return Err(Error::invalid("points", format!("need ≥ {MIN_THETA_POINTS} per axis")));
    }
    if !(a > 0.0 && m > 0.0) {
        return Err(Error::invalid("radii", "A and M must be positive"));
    }
    let nodes = |r: f64| -> Vec<f64> {
        (0..points)
            .map(|i| -r + 2.0 * r * i as f64 / (points - 1) as f64)
            .collect()
    };
    let first = nodes(a);
    let rest = nodes(m);
    let mut out = Vec::new();
    for &t1 in &first {
        match d {
            1 => out.push(vec![t1]),
            2 => out.extend(rest.iter().map(|&t2| vec![t1, t2])),
            _ => {
                for &t2 in &rest {
                    for &t3 in &rest {
                        if t2 * t2 + t3 * t3 <= m * m * (1.0 + 1e-12) {
                            out.push(vec![t1, t2, t3]);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Deviations at each prefix length in `n_list` (ascending) of one dataset.
fn prefix_deviations(spec: &MixtureSpec, rows: &[f64], thetas: &[Vec<f64>], n_list: &[usize], line: &GaussianLine) -> Vec<f64> {
    let d = spec.dim();
    let t0 = spec.theta0();
    let second_moment = d as f64 + dot(t0, t0);
    let pop: Vec<f64> = thetas
        .iter()
        .map(|th| line.expect_logcosh(dot(th, t0), norm(th)))
        .collect();
    let mut lc_sum = vec![0.0; thetas.len()];
    let mut sq_sum = 0.0;
    let mut out = Vec::with_capacity(n_list.len());
    let mut next = 0;
    for (i, x) in rows.chunks_exact(d).enumerate() {
        sq_sum += dot(x, x);
        for (acc, th) in lc_sum.iter_mut().zip(thetas) {
            *acc += logcosh(dot(th, x));
        }
        let n = i + 1;
        if next < n_list.len() && n == n_list[next] {
            let nf = n as f64;
            let quad = -0.5 * (sq_sum / nf - second_moment);
            let sup = lc_sum
                .iter()
                .zip(&pop)
                .map(|(s, p)| (quad + s / nf - p).abs())
                .fold(0.0, f64::max);
            out.push(sup);
            next += 1;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSweepConfig {
    pub a_radius: f64,
    pub m_radius: f64,
    pub points_per_axis: usize,
    pub n_list: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSweep {
    pub n_list: Vec<usize>,
    /// `deviations[r][k]` for replication `r` at `n_list[k]`.
    pub deviations: Vec<Vec<f64>>,
    pub mean_deviation: Vec<f64>,
    /// `mean_deviation[k + 1] / mean_deviation[k]`.
    pub ratios: Vec<f64>,
    pub slope: f64,
}

/// Replication `r` draws its data with seed `seed + r`; smaller `n` use
/// prefixes of the same dataset.
pub fn empirical_process_sweep(
    spec: &MixtureSpec,
    cfg: &EmpiricalSweepConfig,
    contamination: Option<&ContaminationSpec>,
) -> Result<EmpiricalSweep> {
    if cfg.n_list.is_empty() || cfg.n_list.windows(2).any(|w| w[1] <= w[0]) || cfg.n_list[0] == 0 {
        return Err(Error::invalid("n_list", "must be nonempty, positive and strictly increasing"));
    }
    if cfg.reps == 0 {
        return Err(Error::invalid("reps", "must be positive"));
    }
    let thetas = theta_grid(spec.dim(), cfg.a_radius, cfg.m_radius, cfg.points_per_axis)?;
    let cells = thetas.len().saturating_mul(*cfg.n_list.last().unwrap());
    if cells > 2_000_000_000 {
        return Err(Error::Precondition(format!("sweep too large: {cells} evaluations per replication")));
    }
    let line = GaussianLine::new(DEFAULT_NODES)?;
    let n_max = *cfg.n_list.last().unwrap();
    let deviations: Vec<Vec<f64>> = (0..cfg.reps)
        .into_par_iter()
        .map(|r| {
            let data = sample_data(spec, contamination, n_max, cfg.seed.wrapping_add(r as u64))?;
            Ok(prefix_deviations(spec, data.as_flat(), &thetas, &cfg.n_list, &line))
        })
        .collect::<Result<_>>()?;
    let k = cfg.n_list.len();
    let mean_deviation: Vec<f64> = (0..k)
        .map(|j| deviations.iter().map(|row| row[j]).sum::<f64>() / cfg.reps as f64)
        .collect();
    let ratios = mean_deviation.windows(2).map(|w| w[1] / w[0]).collect();
    let xs: Vec<f64> = cfg.n_list.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = mean_deviation.iter().map(|v| v.ln()).collect();
    let slope = if k >= 2 { least_squares_slope(&xs, &ys) } else { f64::NAN };
    Ok(EmpiricalSweep {
        n_list: cfg.n_list.clone(),
        deviations,
        mean_deviation,
        ratios,
        slope,
    })
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Margin of the fitted slope inside [`SLOPE_RANGE`].
pub fn empirical_process_report(sweep: &EmpiricalSweep, seed: u64) -> Result<LemmaReport> {
    let mut t = MarginTracker::new("empirical_process", 0.0);
    let margin = (sweep.slope - SLOPE_RANGE.0).min(SLOPE_RANGE.1 - sweep.slope);
    t.record(margin, || json!({ "slope": sweep.slope, "mean_deviation": sweep.mean_deviation }));
    t.detail("slope", sweep.slope);
    for (k, r) in sweep.ratios.iter().enumerate() {
        t.detail(format!("ratio_{}_{}", sweep.n_list[k + 1], sweep.n_list[k]), *r);
    }
    t.finish(Some(seed), None)
}

/// Contamination part of the deviation: `sup_θ |P_n^γ g_θ − P_n^0 g_θ|` on
/// datasets coupled across `γ`, so that only the replaced points contribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContaminationDeviation {
    pub gammas: Vec<f64>,
    /// Mean over replications of the contamination gap.
    pub mean_extra: Vec<f64>,
    /// Least-squares fit `extra ≈ c₁γ + c₂γ²`.
    pub linear: f64,
    pub quadratic: f64,
}

/// Largest accepted `|c₂|γ_max / c₁`.
pub const QUADRATIC_SHARE: f64 = 0.25;

impl ContaminationDeviation {
    /// Positive linear growth with a quadratic part at most
    /// [`QUADRATIC_SHARE`] of it at the largest `γ`.
    pub fn at_most_linear(&self) -> bool {
        let g = self.gammas.iter().copied().fold(0.0, f64::max);
        self.linear > 0.0 && self.quadratic.abs() * g <= QUADRATIC_SHARE * self.linear
    }
}

fn contamination_gap(clean: &[f64], dirty: &[f64], d: usize, thetas: &[Vec<f64>]) -> f64 {
    let n = (clean.len() / d) as f64;
    let mut sums = vec![0.0; thetas.len()];
    for (x, y) in clean.chunks_exact(d).zip(dirty.chunks_exact(d)) {
        if x == y {
            continue;
        }
        let quad = 0.5 * (dot(x, x) - dot(y, y));
        for (acc, th) in sums.iter_mut().zip(thetas) {
            *acc += quad + logcosh(dot(th, y)) - logcosh(dot(th, x));
        }
    }
    sums.iter().map(|s| (s / n).abs()).fold(0.0, f64::max)
}

pub fn contamination_deviation_sweep(
    spec: &MixtureSpec,
    cfg: &EmpiricalSweepConfig,
    gammas: &[f64],
    noise: &crate::mixture::Noise,
    k: f64,
) -> Result<ContaminationDeviation> {
    let [n] = cfg.n_list[..] else {
        return Err(Error::invalid("n_list", "contamination sweeps use a single n"));
    };
    if gammas.first() != Some(&0.0) {
        return Err(Error::invalid("gammas", "must start at γ = 0"));
    }
    if cfg.reps == 0 {
        return Err(Error::invalid("reps", "must be positive"));
    }
    let thetas = theta_grid(spec.dim(), cfg.a_radius, cfg.m_radius, cfg.points_per_axis)?;
    let specs: Vec<ContaminationSpec> = gammas
        .iter()
        .map(|&g| ContaminationSpec::new(g, noise.clone(), k))
        .collect::<Result<_>>()?;
    let gaps: Vec<Vec<f64>> = (0..cfg.reps)
        .into_par_iter()
        .map(|r| {
            let seed = cfg.seed.wrapping_add(r as u64);
            let clean = sample_data(spec, None, n, seed)?;
            specs
                .iter()
                .map(|c| {
                    let dirty = sample_data(spec, Some(c), n, seed)?;
                    Ok(contamination_gap(clean.as_flat(), dirty.as_flat(), spec.dim(), &thetas))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mean_extra: Vec<f64> = (0..gammas.len())
        .map(|j| gaps.iter().map(|row| row[j]).sum::<f64>() / cfg.reps as f64)
        .collect();
    let (s11, s12, s22, b1, b2) = gammas.iter().zip(&mean_extra).fold((0.0, 0.0, 0.0, 0.0, 0.0), |acc, (&g, &e)| {
        (acc.0 + g * g, acc.1 + g * g * g, acc.2 + g.powi(4), acc.3 + g * e, acc.4 + g * g * e)
    });
    let det = s11 * s22 - s12 * s12;
    if det <= 0.0 {
        return Err(Error::invalid("gammas", "need at least two distinct nonzero values"));
    }
    Ok(ContaminationDeviation {
        gammas: gammas.to_vec(),
        mean_extra,
        linear: (b1 * s22 - b2 * s12) / det,
        quadratic: (s11 * b2 - s12 * b1) / det,
    })
}
