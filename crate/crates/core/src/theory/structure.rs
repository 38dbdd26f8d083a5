//! Shape of the two-dimensional population posterior with `θ₀ = a₀e₁`:
//! the `x₁`-marginal is unimodal on `x₁ ≥ 0` and every conditional column is
//! log-concave.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::density::{log_sum_exp, GridDensity};
use super::isoperimetry::{unimodality_violation, UNIMODAL_TOL};
use super::report::{LemmaReport, MarginTracker};
use crate::error::{Error, Result};
use crate::grid::{Axis, Grid};
use crate::potential::PowerPosterior;

/// Fewest cells per axis accepted by [`check_structure`].
pub const MIN_STRUCTURE_POINTS: usize = 200;
/// Tolerance on second differences of the conditional log mass.
pub const LOG_CONCAVE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub marginal: LemmaReport,
    pub conditional: LemmaReport,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.marginal.passed && self.conditional.passed
    }
}

/// Builds `exp(−U₀)` on `x1 × x2` and checks both shape properties.
pub fn check_structure(pp: &PowerPosterior, x1: Axis, x2: Axis) -> Result<StructureReport> {
    if pp.dim() != 2 {
        return Err(Error::Unsupported(format!("structure check needs d = 2, got {}", pp.dim())));
    }
    let t0 = pp.spec().theta0();
    if t0[1] != 0.0 || t0[0] < 0.0 {
        return Err(Error::Precondition("θ₀ must be a₀e₁ with a₀ ≥ 0".into()));
    }
    if x1.points < MIN_STRUCTURE_POINTS || x2.points < MIN_STRUCTURE_POINTS {
        return Err(Error::Precondition(format!(
            "grid too coarse: need ≥ {MIN_STRUCTURE_POINTS} points per axis"
        )));
    }
    if x1.lo < 0.0 {
        return Err(Error::Precondition("x₁ axis must lie in x₁ ≥ 0".into()));
    }
    let grid = Grid::plane(x1, x2);
    let gd = GridDensity::from_potential(&pp.population(), grid.clone())?;
    let l = gd.logmass();
    let m2 = x2.points;

    let col_log: Vec<f64> = (0..x1.points).map(|i| log_sum_exp(&l[i * m2..(i + 1) * m2])).collect();
    let shift = col_log.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let marginal: Vec<f64> = col_log.iter().map(|c| (c - shift).exp()).collect();
    let (violation, at) = unimodality_violation(&marginal);
    let mut tm = MarginTracker::new("structure_marginal_unimodal", UNIMODAL_TOL);
    tm.record(-violation, || json!({ "x1": x1.center(at) }));

    let mut tc = MarginTracker::new("structure_conditional_log_concave", LOG_CONCAVE_TOL);
    for i in 0..x1.points {
        let col = &l[i * m2..(i + 1) * m2];
        let mut worst = f64::NEG_INFINITY;
        let mut worst_j = 1;
        for j in 1..m2 - 1 {
            let second = col[j - 1] - 2.0 * col[j] + col[j + 1];
            if second > worst {
                worst = second;
                worst_j = j;
            }
        }
        tc.record(-worst, || json!({ "x1": x1.center(i), "x2": x2.center(worst_j) }));
    }
    Ok(StructureReport {
        marginal: tm.finish(None, Some(grid.clone()))?,
        conditional: tc.finish(None, Some(grid))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::MixtureSpec;
    use crate::potential::PriorSpec;

    fn pp(a: f64, beta: f64) -> PowerPosterior {
        PowerPosterior::population_only(MixtureSpec::along_first_axis(2, a).unwrap(), beta, PriorSpec::UniformImproper)
            .unwrap()
    }

    #[test]
    fn separated_case_passes_on_fine_grid() {
        let r = check_structure(&pp(2.0, 4.0), Axis::new(0.0, 6.0, 400).unwrap(), Axis::symmetric(6.0, 400).unwrap())
            .unwrap();
        assert!(r.passed(), "{r:?}");
        let again =
            check_structure(&pp(2.0, 4.0), Axis::new(0.0, 6.0, 400).unwrap(), Axis::symmetric(6.0, 400).unwrap())
                .unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn no_separation_marginal_is_monotone() {
        let r = check_structure(&pp(0.0, 2.0), Axis::new(0.0, 6.0, 200).unwrap(), Axis::symmetric(6.0, 200).unwrap())
            .unwrap();
        assert!(r.passed());
    }

    #[test]
    fn coarse_grid_rejected() {
        let e = check_structure(&pp(1.0, 2.0), Axis::new(0.0, 6.0, 100).unwrap(), Axis::symmetric(6.0, 400).unwrap());
        assert!(matches!(e, Err(Error::Precondition(_))));
    }
}
