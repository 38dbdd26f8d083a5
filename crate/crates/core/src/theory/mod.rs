//! Numerical falsification checks for the geometric inequalities behind the
//! mixing analysis: Poincaré and Cheeger constants on grids, the
//! marginal/conditional combination bound, one-dimensional quasi-concave
//! isoperimetry, the structure of the population posterior, exact grid
//! kernels with their s-conductance, kernel overlap, empirical-process
//! deviations and the dissipativity field.
//!
//! Each check returns a [`LemmaReport`] whose `worst_margin` is signed: a
//! negative value beyond the tolerance is a counterexample, recorded with a
//! reproducible witness.

mod density;
mod dissipativity;
mod empirical;
mod isoperimetry;
mod kernel;
mod poincare;
pub mod random;
mod report;
mod structure;

pub use density::GridDensity;
pub use dissipativity::{check_dissipativity_field, uniform_ball};
pub use empirical::{
    contamination_deviation_sweep, empirical_process_report, empirical_process_sweep, least_squares_slope,
    theta_grid, ContaminationDeviation, EmpiricalSweep, EmpiricalSweepConfig, QUADRATIC_SHARE, SLOPE_RANGE,
};
pub use isoperimetry::{
    check_quasiconcave_isoperimetry, quasiconcave_isoperimetry_unchecked, unimodality_violation, UNIMODAL_TOL,
};
pub use kernel::{
    admissible_pairs, build_grid_kernel, build_rmrw_grid_kernel, check_kernel_overlap, kernel_overlap,
    overlap_step_limit, GridKernel, Overlap,
};
pub use poincare::{
    check_poincare_combination, cheeger_constant, combination_constants, curvature_floor, poincare_constant,
    CheegerEstimate, CombinationConstants, EIGEN_TOL,
};
pub use report::{LemmaReport, MarginTracker, LEMMA_TOL};
pub use structure::{check_structure, StructureReport, LOG_CONCAVE_TOL, MIN_STRUCTURE_POINTS};
