//! Mixing and shape diagnostics for chain output.
//!
//! Total variation is only computed against low-dimensional grid references
//! (`d ≤ 2`); higher-dimensional runs are summarised through projections,
//! mode balance, effective sample size and tail mass.

mod ess;
mod histogram;
mod mixing;

pub use ess::{ess, EssReport};
pub use histogram::{Histogram, Peak};
pub use mixing::{checkpoint_schedule, mixing_time_estimate, MixingCurve, MIN_CHAINS};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::grid::Grid;
use crate::mixture::{dot, norm};
use crate::potential::{Potential, PowerPosterior};
use crate::sampler::ChainTrace;

/// Normalised cell masses on a 1-D or 2-D grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceDensity {
    grid: Grid,
    masses: Vec<f64>,
}

/// Which potential a reference is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Empirical,
    Population,
}

impl ReferenceDensity {
    /// Normalises nonnegative weights.
    pub fn from_weights(grid: Grid, weights: Vec<f64>) -> Result<Self> {
        check_dim(grid.cells(), weights.len())?;
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid("weights", "must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::invalid("weights", "total mass is zero"));
        }
        let masses = weights.into_iter().map(|w| w / total).collect();
        Ok(Self { grid, masses })
    }

    /// Masses `∝ exp(−V(center))`, normalised with a max shift.
    pub fn from_potential<P: Potential + ?Sized>(target: &P, grid: Grid) -> Result<Self> {
        check_dim(target.dim(), grid.dim())?;
        let logw: Vec<f64> = (0..grid.cells()).map(|c| -target.value(&grid.center(c))).collect();
        let top = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return Err(Error::Numerical("reference potential is not finite on the grid".into()));
        }
        Self::from_weights(grid, logw.into_iter().map(|l| (l - top).exp()).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim()];
        for (c, p) in self.masses.iter().enumerate() {
            for (mi, x) in m.iter_mut().zip(self.grid.center(c)) {
                *mi += p * x;
            }
        }
        m
    }

    /// Mass of cells whose centre lies strictly outside `B(0, r)`.
    pub fn tail_mass(&self, r: f64) -> f64 {
        (0..self.grid.cells())
            .filter(|&c| norm(&self.grid.center(c)) > r)
            .map(|c| self.masses[c])
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }

    /// Same grid, coarsened by summing blocks of `factor` cells per axis.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || self.grid.axes().iter().any(|a| a.points % factor != 0) {
            return Err(Error::invalid("factor", "must divide the cell count of every axis"));
        }
        let axes: Vec<_> = self
            .grid
            .axes()
            .iter()
            .map(|a| crate::grid::Axis { points: a.points / factor, ..*a })
            .collect();
        let coarse = Grid::new(axes)?;
        let mut w = vec![0.0; coarse.cells()];
        for (c, p) in self.masses.iter().enumerate() {
            let target = coarse.locate(&self.grid.center(c)).expect("coarse grid covers fine grid");
            w[target] += p;
        }
        Self::from_weights(coarse, w)
    }
}

/// Grid reference for the empirical (`U`) or population (`U₀`) posterior.
///
/// The grid must contain the ball of radius `R_{0.001}` (tail radius with
/// constant 1).
pub fn build_reference(pp: &PowerPosterior, grid: Grid, level: Level) -> Result<ReferenceDensity> {
    let d = pp.dim();
    if d > 2 {
        return Err(Error::Unsupported(format!("grid references need d ≤ 2, got d = {d}")));
    }
    check_dim(d, grid.dim())?;
    let r = tail_radius(d, pp.spec().theta0_norm(), pp.beta(), 1e-3)?;
    if !grid.covers_ball(r) {
        return Err(Error::Precondition(format!("grid does not cover the ball of radius {r:.4}")));
    }
    match level {
        Level::Empirical => {
            if pp.data().is_none() {
                return Err(Error::EmptyDataset);
            }
            ReferenceDensity::from_potential(pp, grid)
        }
        Level::Population => ReferenceDensity::from_potential(&pp.population(), grid),
    }
}

/// `½ Σ |p − q|` for two mass vectors on the same support.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// TV between the empirical law of `points` on the reference grid and the
/// reference. Points off the grid count as mass the reference does not have.
pub fn tv_of_points<'a>(points: impl IntoIterator<Item = &'a [f64]>, reference: &ReferenceDensity) -> Result<f64> {
    let grid = reference.grid();
    let mut counts = vec![0u64; grid.cells()];
    let mut outside = 0u64;
    let mut total = 0u64;
    for x in points {
        check_dim(grid.dim(), x.len())?;
        total += 1;
        match grid.locate(x) {
            Some(c) => counts[c] += 1,
            None => outside += 1,
        }
    }
    if total == 0 {
        return Err(Error::invalid("trace", "no states left after burn-in"));
    }
    let n = total as f64;
    let inside: f64 = counts
        .iter()
        .zip(reference.masses())
        .map(|(&c, &r)| (c as f64 / n - r).abs())
        .sum();
    Ok((0.5 * (inside + outside as f64 / n)).clamp(0.0, 1.0))
}

pub fn tv_to_reference(traces: &[&ChainTrace], reference: &ReferenceDensity, burn_in: usize) -> Result<f64> {
    tv_of_points(traces.iter().flat_map(|t| t.states().skip(burn_in)), reference)
}

/// Fraction of post-burn-in states with positive projection on `direction`.
pub fn mode_balance(trace: &ChainTrace, direction: &[f64], burn_in: usize) -> Result<f64> {
    check_dim(trace.dim(), direction.len())?;
    if norm(direction) == 0.0 {
        return Err(Error::invalid("direction", "must be nonzero"));
    }
    let states: Vec<&[f64]> = trace.states().skip(burn_in).collect();
    if states.is_empty() {
        return Err(Error::invalid("trace", "no states left after burn-in"));
    }
    let pos = states.iter().filter(|s| dot(s, direction) > 0.0).count();
    Ok(pos as f64 / states.len() as f64)
}

/// `R_ε = C(1 + ‖θ₀‖ + √(d + log(1/ε))/β)` with `C = 1`.
pub fn tail_radius(d: usize, theta0_norm: f64, beta: f64, eps: f64) -> Result<f64> {
    tail_radius_with_constant(d, theta0_norm, beta, eps, 1.0)
}

pub fn tail_radius_with_constant(d: usize, theta0_norm: f64, beta: f64, eps: f64, c: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("eps", format!("{eps} is outside (0, 1)")));
    }
    if !(beta > 0.0) || !(c > 0.0) || !(theta0_norm >= 0.0) || d == 0 {
        return Err(Error::invalid("tail_radius", "need d ≥ 1, β > 0, C > 0, ‖θ₀‖ ≥ 0"));
    }
    Ok(c * (1.0 + theta0_norm + (d as f64 + (1.0 / eps).ln()).sqrt() / beta))
}

/// Fraction of post-burn-in states with `‖θ‖ > r`.
pub fn tail_mass(trace: &ChainTrace, r: f64, burn_in: usize) -> Result<f64> {
    let states: Vec<&[f64]> = trace.states().skip(burn_in).collect();
    if states.is_empty() {
        return Err(Error::invalid("trace", "no states left after burn-in"));
    }
    Ok(states.iter().filter(|s| norm(s) > r).count() as f64 / states.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingSummary {
    pub eps: f64,
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub tv_to_reference: Option<f64>,
    pub mode_balance: f64,
    pub ess_per_coordinate: Vec<f64>,
    pub ess_degenerate: bool,
    pub tail_radius: f64,
    pub tail_mass_outside: f64,
    pub mixing_time_estimate: Option<MixingSummary>,
    pub acceptance_rate: f64,
}

impl DiagnosticsReport {
    /// Summary of one trace: mode balance along `direction`, ESS, and tail
    /// mass outside `radius`.
    pub fn for_trace(trace: &ChainTrace, direction: &[f64], burn_in: usize, radius: f64) -> Result<Self> {
        let e = ess(trace, burn_in)?;
        Ok(Self {
            tv_to_reference: None,
            mode_balance: mode_balance(trace, direction, burn_in)?,
            ess_degenerate: e.degenerate.iter().any(|&d| d),
            ess_per_coordinate: e.per_coordinate,
            tail_radius: radius,
            tail_mass_outside: tail_mass(trace, radius, burn_in)?,
            mixing_time_estimate: None,
            acceptance_rate: trace.acceptance_rate,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Axis;
    use approx::assert_relative_eq;

    #[test]
    fn tail_radius_reference_value() {
        let r = tail_radius(1, 0.0, 1.0, (-1.0f64).exp()).unwrap();
        assert_relative_eq!(r, 1.0 + 2f64.sqrt(), max_relative = 1e-15);
        assert!(tail_radius(1, 0.0, 1.0, 0.0).is_err());
        assert!(tail_radius(1, 0.0, 1.0, 1.0).is_err());
        assert!(tail_radius(3, 1.0, 2.0, 0.001).unwrap() > tail_radius(3, 1.0, 2.0, 0.01).unwrap());
        assert!(tail_radius(4, 1.0, 2.0, 0.01).unwrap() > tail_radius(3, 1.0, 2.0, 0.01).unwrap());
        assert!(tail_radius(3, 1.0, 4.0, 0.01).unwrap() < tail_radius(3, 1.0, 2.0, 0.01).unwrap());
    }

    #[test]
    fn mode_balance_edge_cases() {
        let all_pos = ChainTrace::from_states(1, vec![0.5, 1.0, 2.0]).unwrap();
        assert_eq!(mode_balance(&all_pos, &[1.0], 0).unwrap(), 1.0);
        assert!(mode_balance(&all_pos, &[0.0], 0).is_err());
        assert!(mode_balance(&all_pos, &[1.0], 3).is_err());
        let paired = ChainTrace::from_states(2, vec![0.5, 1.0, -0.5, -1.0, 2.0, 0.1, -2.0, -0.1]).unwrap();
        assert_eq!(mode_balance(&paired, &[1.0, 0.0], 0).unwrap(), 0.5);
    }

    #[test]
    fn tv_outside_grid_is_one() {
        let grid = Grid::line(Axis::symmetric(1.0, 10).unwrap());
        let r = ReferenceDensity::from_weights(grid, vec![1.0; 10]).unwrap();
        let tr = ChainTrace::from_states(1, vec![5.0, 6.0, -7.0]).unwrap();
        assert_eq!(tv_to_reference(&[&tr], &r, 0).unwrap(), 1.0);
        assert!(tv_to_reference(&[&tr], &r, 10).is_err());
    }

    #[test]
    fn reference_tail_mass_limits() {
        let grid = Grid::line(Axis::symmetric(2.0, 8).unwrap());
        let r = ReferenceDensity::from_weights(grid, vec![1.0; 8]).unwrap();
        assert_eq!(r.tail_mass(0.0), 1.0);
        assert_eq!(r.tail_mass(3.0), 0.0);
        assert!(r.tail_mass(1.0) <= r.tail_mass(0.5));
    }

    #[test]
    fn coarsening_preserves_mass() {
        let grid = Grid::line(Axis::symmetric(2.0, 8).unwrap());
        let r = ReferenceDensity::from_weights(grid, (1..=8).map(f64::from).collect()).unwrap();
        let c = r.coarsen(2).unwrap();
        assert_eq!(c.masses().len(), 4);
        assert_relative_eq!(c.masses().iter().sum::<f64>(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(c.masses()[0], 3.0 / 36.0, max_relative = 1e-14);
        assert!(r.coarsen(3).is_err());
    }
}
