//! Regular cell-centred lattices in one or two dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `points` equal cells covering `[lo, hi]`; values live at cell centres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::invalid("axis", format!("need finite lo < hi, got [{lo}, {hi}]")));
        }
        if points == 0 {
            return Err(Error::invalid("axis", "need at least one cell"));
        }
        Ok(Self { lo, hi, points })
    }

    pub fn symmetric(half_width: f64, points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, points)
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.points as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.width()
    }

    pub fn edge(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.width()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.center(i)).collect()
    }

    /// Cell containing `x`; the upper boundary belongs to the last cell.
    pub fn locate(&self, x: f64) -> Option<usize> {
        if !(x >= self.lo && x <= self.hi) {
            return None;
        }
        let i = ((x - self.lo) / self.width()).floor() as usize;
        Some(i.min(self.points - 1))
    }

    pub fn is_symmetric(&self) -> bool {
        (self.lo + self.hi).abs() <= 1e-12 * self.hi.abs().max(1.0)
    }
}

/// Product lattice of one or two axes, cells indexed row-major
/// (`index = i₀·points₁ + i₁`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::Unsupported(format!(
                "grids have 1 or 2 axes, got {}",
                axes.len()
            )));
        }
        Ok(Self { axes })
    }

    pub fn line(axis: Axis) -> Self {
        Self { axes: vec![axis] }
    }

    pub fn plane(a: Axis, b: Axis) -> Self {
        Self { axes: vec![a, b] }
    }

    /// `[−r, r]^d` with `points` cells per axis.
    pub fn cube(d: usize, r: f64, points: usize) -> Result<Self> {
        let axis = Axis::symmetric(r, points)?;
        Self::new(vec![axis; d])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    pub fn cells(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::width).product()
    }

    pub fn center(&self, cell: usize) -> Vec<f64> {
        match self.axes.as_slice() {
            [a] => vec![a.center(cell)],
            [a, b] => vec![a.center(cell / b.points), b.center(cell % b.points)],
            _ => unreachable!(),
        }
    }

    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        match self.axes.as_slice() {
            [a] => a.locate(x[0]),
            [a, b] => Some(a.locate(x[0])? * b.points + b.locate(x[1])?),
            _ => unreachable!(),
        }
    }

    /// Cell containing `−x` for the centre `x` of `cell`, on grids symmetric
    /// about the origin.
    pub fn mirror(&self, cell: usize) -> usize {
        match self.axes.as_slice() {
            [a] => a.points - 1 - cell,
            [a, b] => {
                let (i, j) = (cell / b.points, cell % b.points);
                (a.points - 1 - i) * b.points + (b.points - 1 - j)
            }
            _ => unreachable!(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.axes.iter().all(Axis::is_symmetric)
    }

    /// Whether the closed ball `‖θ‖ ≤ r` lies inside the grid box.
    pub fn covers_ball(&self, r: f64) -> bool {
        self.axes.iter().all(|a| a.lo <= -r && a.hi >= r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_geometry() {
        let a = Axis::new(0.0, 1.0, 4).unwrap();
        assert_eq!(a.width(), 0.25);
        assert_eq!(a.center(0), 0.125);
        assert_eq!(a.locate(1.0), Some(3));
        assert_eq!(a.locate(-0.1), None);
        assert_eq!(a.locate(f64::NAN), None);
        assert!(Axis::new(1.0, 0.0, 3).is_err());
    }

    #[test]
    fn mirror_cells() {
        let g = Grid::plane(Axis::symmetric(2.0, 4).unwrap(), Axis::symmetric(3.0, 6).unwrap());
        for cell in 0..g.cells() {
            let c = g.center(cell);
            let m = g.center(g.mirror(cell));
            assert!((c[0] + m[0]).abs() < 1e-12 && (c[1] + m[1]).abs() < 1e-12);
            assert_eq!(g.locate(&c), Some(cell));
        }
    }
}
