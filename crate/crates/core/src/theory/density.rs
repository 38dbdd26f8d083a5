use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::grid::{Axis, Grid};
use crate::potential::Potential;

/// Normalised masses on a 1-D or 2-D grid, kept alongside their logarithms
/// so that ratios of tiny masses stay exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDensity {
    grid: Grid,
    logmass: Vec<f64>,
    mass: Vec<f64>,
}

impl GridDensity {
    /// Normalises unnormalised log weights. `−∞` marks a cell outside the
    /// support.
    pub fn from_log_weights(grid: Grid, logw: Vec<f64>) -> Result<Self> {
        check_dim(grid.cells(), logw.len())?;
        if logw.iter().any(|l| l.is_nan() || *l == f64::INFINITY) {
            return Err(Error::invalid("log weights", "NaN or +∞"));
        }
        let top = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Err(Error::invalid("log weights", "empty support"));
        }
        let total: f64 = logw.iter().map(|l| (l - top).exp()).sum();
        let shift = top + total.ln();
        let logmass: Vec<f64> = logw.iter().map(|l| l - shift).collect();
        let mass = logmass.iter().map(|l| l.exp()).collect();
        Ok(Self { grid, logmass, mass })
    }

    /// Masses `∝ exp(f(centre))`.
    pub fn from_log_density(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let logw = (0..grid.cells()).map(|c| f(&grid.center(c))).collect();
        Self::from_log_weights(grid, logw)
    }

    /// Masses `∝ exp(−V(centre))`.
    pub fn from_potential<P: Potential + ?Sized>(target: &P, grid: Grid) -> Result<Self> {
        check_dim(target.dim(), grid.dim())?;
        Self::from_log_density(grid, |x| -target.value(x))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn logmass(&self) -> &[f64] {
        &self.logmass
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn support_size(&self) -> usize {
        self.logmass.iter().filter(|l| l.is_finite()).count()
    }

    /// Marginal along `axis` of a 2-D density.
    pub fn marginal(&self, axis: usize) -> Result<Self> {
        let (a, b) = self.plane_axes()?;
        let (keep, m) = match axis {
            0 => (a, a.points),
            1 => (b, b.points),
            _ => return Err(Error::invalid("axis", format!("{axis} is not 0 or 1"))),
        };
        let logw = (0..m)
            .map(|k| {
                let cells: Vec<f64> = if axis == 0 {
                    (0..b.points).map(|j| self.logmass[k * b.points + j]).collect()
                } else {
                    (0..a.points).map(|i| self.logmass[i * b.points + k]).collect()
                };
                log_sum_exp(&cells)
            })
            .collect();
        Self::from_log_weights(Grid::line(keep), logw)
    }

    /// Conditional law along axis 1 given the axis-0 cell `i`.
    pub fn conditional(&self, i: usize) -> Result<Self> {
        let (a, b) = self.plane_axes()?;
        if i >= a.points {
            return Err(Error::invalid("column", format!("{i} ≥ {}", a.points)));
        }
        let logw = self.logmass[i * b.points..(i + 1) * b.points].to_vec();
        if logw.iter().all(|l| *l == f64::NEG_INFINITY) {
            return Err(Error::Precondition(format!("conditional undefined: column {i} has zero mass")));
        }
        Self::from_log_weights(Grid::line(b), logw)
    }

    /// Restriction to the smallest sub-box containing every cell whose mass
    /// exceeds `floor` times the largest mass.
    pub fn clipped(&self, floor: f64) -> Result<Self> {
        let top = self.mass.iter().copied().fold(0.0, f64::max);
        let keep = |c: usize| self.mass[c] > floor * top;
        match self.grid.axes() {
            [a] => {
                let lo = (0..a.points).find(|&i| keep(i)).unwrap_or(0);
                let hi = (0..a.points).rev().find(|&i| keep(i)).unwrap_or(0);
                let axis = sub_axis(a, lo, hi)?;
                Self::from_log_weights(Grid::line(axis), self.logmass[lo..=hi].to_vec())
            }
            [a, b] => {
                let (mut ilo, mut ihi, mut jlo, mut jhi) = (usize::MAX, 0, usize::MAX, 0);
                for i in 0..a.points {
                    for j in 0..b.points {
                        if keep(i * b.points + j) {
                            ilo = ilo.min(i);
                            ihi = ihi.max(i);
                            jlo = jlo.min(j);
                            jhi = jhi.max(j);
                        }
                    }
                }
                let (ax, bx) = (sub_axis(a, ilo, ihi)?, sub_axis(b, jlo, jhi)?);
                let logw = (ilo..=ihi)
                    .flat_map(|i| (jlo..=jhi).map(move |j| i * b.points + j))
                    .map(|c| self.logmass[c])
                    .collect();
                Self::from_log_weights(Grid::plane(ax, bx), logw)
            }
            _ => unreachable!(),
        }
    }

    pub(crate) fn plane_axes(&self) -> Result<(Axis, Axis)> {
        match self.grid.axes() {
            [a, b] => Ok((*a, *b)),
            _ => Err(Error::Unsupported("operation needs a 2-D density".into())),
        }
    }

    pub(crate) fn line_axis(&self) -> Result<Axis> {
        match self.grid.axes() {
            [a] => Ok(*a),
            _ => Err(Error::Unsupported("operation needs a 1-D density".into())),
        }
    }
}

fn sub_axis(a: &Axis, lo: usize, hi: usize) -> Result<Axis> {
    if lo > hi || hi >= a.points {
        return Err(Error::Precondition("degenerate support".into()));
    }
    Axis::new(a.edge(lo), a.edge(hi + 1), hi - lo + 1)
}

pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + values.iter().map(|v| (v - top).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn normalises_and_keeps_logs() {
        let g = Grid::line(Axis::new(0.0, 1.0, 4).unwrap());
        let d = GridDensity::from_log_weights(g, vec![0.0, 1.0, f64::NEG_INFINITY, -700.0]).unwrap();
        assert_relative_eq!(d.mass().iter().sum::<f64>(), 1.0, max_relative = 1e-15);
        assert_eq!(d.mass()[2], 0.0);
        assert_relative_eq!(d.logmass()[1] - d.logmass()[0], 1.0, max_relative = 1e-14);
        assert_eq!(d.support_size(), 3);
    }

    #[test]
    fn marginal_of_product_is_factor() {
        let a = Axis::new(-2.0, 2.0, 8).unwrap();
        let b = Axis::new(-1.0, 3.0, 5).unwrap();
        let joint = GridDensity::from_log_density(Grid::plane(a, b), |x| -x[0] * x[0] - 0.3 * x[1]).unwrap();
        let m = joint.marginal(0).unwrap();
        let direct = GridDensity::from_log_density(Grid::line(a), |x| -x[0] * x[0]).unwrap();
        for (p, q) in m.mass().iter().zip(direct.mass()) {
            assert_relative_eq!(p, q, max_relative = 1e-12);
        }
        let c = joint.conditional(3).unwrap();
        let cond = GridDensity::from_log_density(Grid::line(b), |x| -0.3 * x[0]).unwrap();
        for (p, q) in c.mass().iter().zip(cond.mass()) {
            assert_relative_eq!(p, q, max_relative = 1e-12);
        }
    }

    #[test]
    fn clipping_drops_negligible_cells() {
        let g = Grid::line(Axis::new(-10.0, 10.0, 200).unwrap());
        let d = GridDensity::from_log_density(g, |x| -0.5 * x[0] * x[0]).unwrap();
        let c = d.clipped(1e-14).unwrap();
        let a = c.line_axis().unwrap();
        assert!(a.lo > -10.0 && a.hi < 10.0);
        assert_relative_eq!(a.lo, -a.hi, epsilon = 1e-12);
        assert!(c.mass().iter().all(|&m| m > 0.0));
    }
}
