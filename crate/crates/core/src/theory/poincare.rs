//! Discrete Poincaré and Cheeger constants.
//!
//! The Poincaré constant is `1/λ` for the smallest nonzero eigenvalue `λ` of
//! the nearest-neighbour diffusion reversible for the grid masses, with edge
//! weight `√(π_a π_b)/h²`. After the similarity `Π^{−1/2} · Π^{1/2}` its
//! off-diagonal entries are exactly `−1/h²`.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::density::GridDensity;
use super::report::{LemmaReport, MarginTracker, LEMMA_TOL};
use crate::error::{Error, Result};
use crate::linalg::{lanczos_smallest_in_complement, tridiagonal_eigenvalue};

/// Residual tolerance for the sparse eigensolve.
pub const EIGEN_TOL: f64 = 1e-10;

pub fn poincare_constant(gd: &GridDensity) -> Result<f64> {
    let lambda = match gd.dim() {
        1 => spectral_gap_1d(gd)?,
        2 => spectral_gap_2d(gd)?,
        d => return Err(Error::Unsupported(format!("Poincaré constant on a {d}-D grid"))),
    };
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Numerical(format!("spectral gap {lambda} is not positive")));
    }
    Ok(1.0 / lambda)
}

/// Index range `[lo, hi]` of the support; interior holes are rejected.
fn support_run(logmass: &[f64]) -> Result<(usize, usize)> {
    let lo = logmass.iter().position(|l| l.is_finite());
    let hi = logmass.iter().rposition(|l| l.is_finite());
    match (lo, hi) {
        (Some(lo), Some(hi)) if hi > lo => {
            if logmass[lo..=hi].iter().any(|l| !l.is_finite()) {
                return Err(Error::Precondition("support has an interior hole".into()));
            }
            Ok((lo, hi))
        }
        _ => Err(Error::Precondition("degenerate (single-cell) support".into())),
    }
}

fn spectral_gap_1d(gd: &GridDensity) -> Result<f64> {
    let h = gd.line_axis()?.width();
    let (lo, hi) = support_run(gd.logmass())?;
    let l = &gd.logmass()[lo..=hi];
    let inv = 1.0 / (h * h);
    let m = l.len();
    let diag: Vec<f64> = (0..m)
        .map(|i| {
            let left = if i > 0 { ((l[i - 1] - l[i]) / 2.0).exp() } else { 0.0 };
            let right = if i + 1 < m { ((l[i + 1] - l[i]) / 2.0).exp() } else { 0.0 };
            inv * (left + right)
        })
        .collect();
    let off = vec![-inv; m - 1];
    tridiagonal_eigenvalue(&diag, &off, 1)
}

fn spectral_gap_2d(gd: &GridDensity) -> Result<f64> {
    let (a, b) = gd.plane_axes()?;
    let l = gd.logmass();
    if l.iter().any(|x| !x.is_finite()) {
        return Err(Error::Precondition("2-D eigensolve needs every cell in the support; clip first".into()));
    }
    let n = l.len();
    if n < 2 {
        return Err(Error::Precondition("degenerate (single-cell) support".into()));
    }
    let (ia, ib) = (1.0 / (a.width() * a.width()), 1.0 / (b.width() * b.width()));
    let (ma, mb) = (a.points, b.points);
    let neighbours = |c: usize| {
        let (i, j) = (c / mb, c % mb);
        let mut out = [(usize::MAX, 0.0); 4];
        if i > 0 {
            out[0] = (c - mb, ia);
        }
        if i + 1 < ma {
            out[1] = (c + mb, ia);
        }
        if j > 0 {
            out[2] = (c - 1, ib);
        }
        if j + 1 < mb {
            out[3] = (c + 1, ib);
        }
        out
    };
    let diag: Vec<f64> = (0..n)
        .map(|c| {
            neighbours(c)
                .iter()
                .filter(|(k, _)| *k != usize::MAX)
                .map(|&(k, w)| w * ((l[k] - l[c]) / 2.0).exp())
                .sum()
        })
        .collect();
    let apply = |v: &[f64], out: &mut [f64]| {
        for c in 0..n {
            let mut acc = diag[c] * v[c];
            for &(k, w) in neighbours(c).iter() {
                if k != usize::MAX {
                    acc -= w * v[k];
                }
            }
            out[c] = acc;
        }
    };
    let null: Vec<f64> = gd.mass().iter().map(|m| m.sqrt()).collect();
    lanczos_smallest_in_complement(n, apply, &null, EIGEN_TOL, n.min(4000))
}

/// Cheeger constant: exact on 1-D grids, an upper bound on 2-D grids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheegerEstimate {
    pub value: f64,
    pub upper_bound: bool,
}

/// Number of halfspace directions searched on 2-D grids.
const HALFSPACE_DIRECTIONS: usize = 16;

pub fn cheeger_constant(gd: &GridDensity) -> Result<CheegerEstimate> {
    let value = match gd.dim() {
        1 => cheeger_1d(gd)?,
        2 => cheeger_2d(gd)?,
        d => return Err(Error::Unsupported(format!("Cheeger constant on a {d}-D grid"))),
    };
    Ok(CheegerEstimate {
        value,
        upper_bound: gd.dim() == 2,
    })
}

fn cheeger_1d(gd: &GridDensity) -> Result<f64> {
    let h = gd.line_axis()?.width();
    let (l, m) = (gd.logmass(), gd.mass());
    let mut below = 0.0;
    let mut best = f64::INFINITY;
    for i in 0..l.len() - 1 {
        below += m[i];
        let side = below.min(1.0 - below);
        if side > 0.0 {
            best = best.min(((l[i] + l[i + 1]) / 2.0).exp() / h / side);
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::Precondition("degenerate (single-cell) support".into()))
    }
}

fn cheeger_2d(gd: &GridDensity) -> Result<f64> {
    let (a, b) = gd.plane_axes()?;
    let (l, m) = (gd.logmass(), gd.mass());
    let (ma, mb) = (a.points, b.points);
    let n = ma * mb;
    let edge = |c: usize, k: usize, h: f64| ((l[c] + l[k]) / 2.0).exp() / h;

    let mut orders: Vec<Vec<usize>> = Vec::new();
    orders.push((0..n).collect());
    orders.push((0..n).map(|t| (t % ma) * mb + t / ma).collect());
    let mut level: Vec<usize> = (0..n).collect();
    level.sort_by(|&x, &y| l[y].total_cmp(&l[x]).then(x.cmp(&y)));
    orders.push(level);
    for k in 0..HALFSPACE_DIRECTIONS {
        let angle = std::f64::consts::PI * 2.0 * k as f64 / HALFSPACE_DIRECTIONS as f64;
        let (u, v) = (angle.cos(), angle.sin());
        let proj: Vec<f64> = (0..n)
            .map(|c| u * a.center(c / mb) + v * b.center(c % mb))
            .collect();
        let mut o: Vec<usize> = (0..n).collect();
        o.sort_by(|&x, &y| proj[x].total_cmp(&proj[y]).then(x.cmp(&y)));
        orders.push(o);
    }

    let mut best = f64::INFINITY;
    for order in &orders {
        let mut inside = vec![false; n];
        let mut boundary = 0.0;
        let mut mass = 0.0;
        for &c in order.iter().take(n - 1) {
            let (i, j) = (c / mb, c % mb);
            let mut nb = Vec::with_capacity(4);
            if i > 0 {
                nb.push((c - mb, a.width()));
            }
            if i + 1 < ma {
                nb.push((c + mb, a.width()));
            }
            if j > 0 {
                nb.push((c - 1, b.width()));
            }
            if j + 1 < mb {
                nb.push((c + 1, b.width()));
            }
            for (k, h) in nb {
                let w = edge(c, k, h);
                boundary += if inside[k] { -w } else { w };
            }
            inside[c] = true;
            mass += m[c];
            let side = mass.min(1.0 - mass);
            if side > 1e-12 {
                best = best.min(boundary.max(0.0) / side);
            }
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::Precondition("degenerate (single-cell) support".into()))
    }
}

/// Largest positive second difference of the log mass, `max(0, −inf ∂²log π)`
/// in the sense `∇²(−log π) ≥ −K`.
pub fn curvature_floor(gd: &GridDensity) -> Result<f64> {
    let h = gd.line_axis()?.width();
    let l = gd.logmass();
    let mut k: f64 = 0.0;
    for w in l.windows(3) {
        if w.iter().all(|x| x.is_finite()) {
            k = k.max((w[0] - 2.0 * w[1] + w[2]) / (h * h));
        }
    }
    Ok(k)
}

/// Constants entering the combination bound `C̃ = 2(C₁ + C₂ + C₁C₂L²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombinationConstants {
    pub c1: f64,
    pub c2: f64,
    pub l: f64,
    pub c_joint: f64,
}

impl CombinationConstants {
    pub fn bound(&self) -> f64 {
        2.0 * (self.c1 + self.c2 + self.c1 * self.c2 * self.l * self.l)
    }

    pub fn margin(&self) -> f64 {
        self.bound() - self.c_joint
    }
}

/// `C₁` from the axis-0 marginal, `C₂` as the worst column conditional and
/// `L` as the largest finite-difference slope of the log conditional in `x₁`.
pub fn combination_constants(joint: &GridDensity) -> Result<CombinationConstants> {
    let (a, b) = joint.plane_axes()?;
    let c1 = poincare_constant(&joint.marginal(0)?)?;
    let mut c2: f64 = 0.0;
    let mut cond_logs = Vec::with_capacity(a.points);
    for i in 0..a.points {
        let cond = joint.conditional(i)?;
        c2 = c2.max(poincare_constant(&cond)?);
        cond_logs.push(cond.logmass().to_vec());
    }
    let mut l: f64 = 0.0;
    for i in 0..a.points.saturating_sub(1) {
        for j in 0..b.points {
            let slope = (cond_logs[i + 1][j] - cond_logs[i][j]) / a.width();
            if !slope.is_finite() {
                return Err(Error::Precondition(format!(
                    "log conditional slope is unbounded at cell ({i}, {j}); clip first"
                )));
            }
            l = l.max(slope.abs());
        }
    }
    let c_joint = poincare_constant(joint)?;
    Ok(CombinationConstants { c1, c2, l, c_joint })
}

pub fn check_poincare_combination(joint: &GridDensity) -> Result<LemmaReport> {
    let c = combination_constants(joint)?;
    let mut t = MarginTracker::new("poincare_combination", LEMMA_TOL);
    t.record(c.margin(), || json!(c));
    t.detail("c1", c.c1);
    t.detail("c2", c.c2);
    t.detail("l", c.l);
    t.detail("c_joint", c.c_joint);
    t.detail("bound", c.bound());
    t.finish(None, Some(joint.grid().clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Axis, Grid};
    use approx::assert_relative_eq;

    fn line(lo: f64, hi: f64, m: usize, f: impl Fn(f64) -> f64) -> GridDensity {
        GridDensity::from_log_density(Grid::line(Axis::new(lo, hi, m).unwrap()), |x| f(x[0])).unwrap()
    }

    #[test]
    fn gaussian_constant_is_its_variance() {
        let g = line(-6.0, 6.0, 2000, |x| -0.5 * x * x);
        assert_relative_eq!(poincare_constant(&g).unwrap(), 1.0, max_relative = 0.02);
    }

    #[test]
    fn uniform_constant_and_scaling() {
        let u1 = poincare_constant(&line(0.0, 1.0, 2000, |_| 0.0)).unwrap();
        let u2 = poincare_constant(&line(0.0, 2.0, 2000, |_| 0.0)).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert_relative_eq!(u1, 1.0 / pi2, max_relative = 0.02);
        assert_relative_eq!(u2 / u1, 4.0, max_relative = 0.02);
    }

    #[test]
    fn refinement_changes_little() {
        let f = |x: f64| -0.5 * x * x + (2.0 * x).cos();
        let coarse = poincare_constant(&line(-6.0, 6.0, 600, f)).unwrap();
        let fine = poincare_constant(&line(-6.0, 6.0, 1200, f)).unwrap();
        assert!((coarse / fine - 1.0).abs() < 0.01);
    }

    #[test]
    fn single_cell_is_degenerate() {
        let g = line(0.0, 1.0, 1, |_| 0.0);
        assert!(poincare_constant(&g).is_err());
        assert!(cheeger_constant(&g).is_err());
    }

    #[test]
    fn uniform_cheeger_is_two() {
        let c = cheeger_constant(&line(0.0, 1.0, 1000, |_| 0.0)).unwrap();
        assert_relative_eq!(c.value, 2.0, max_relative = 1e-9);
        assert!(!c.upper_bound);
    }

    #[test]
    fn bimodal_cheeger_sits_at_the_valley() {
        let f = |x: f64| {
            let a = -0.5 * (x - 3.0) * (x - 3.0);
            let b = -0.5 * (x + 3.0) * (x + 3.0);
            a.max(b) + (-(a - b).abs()).exp().ln_1p()
        };
        let g = line(-9.0, 9.0, 1800, f);
        let z = cheeger_constant(&g).unwrap().value;
        let h = 18.0 / 1800.0;
        let mid = 899;
        let valley = ((g.logmass()[mid] + g.logmass()[mid + 1]) / 2.0).exp() / h;
        assert_relative_eq!(z, valley / 0.5, max_relative = 1e-9);
        assert!(poincare_constant(&g).unwrap() <= 4.0 / (z * z));
    }

    #[test]
    fn gaussian_2d_constants() {
        let ax = Axis::symmetric(5.0, 40).unwrap();
        let g = GridDensity::from_log_density(Grid::plane(ax, ax), |x| -0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
        let c = combination_constants(&g).unwrap();
        assert_relative_eq!(c.c1, 1.0, max_relative = 0.03);
        assert_relative_eq!(c.c2, 1.0, max_relative = 0.03);
        assert!(c.l < 1e-9);
        assert_relative_eq!(c.c_joint, 1.0, max_relative = 0.03);
        assert!(c.margin() > 2.0);
        let z = cheeger_constant(&g).unwrap();
        assert!(z.upper_bound);
        // Gaussian isoperimetry: the half-plane cut gives 2φ(0) ≈ 0.798.
        assert!(z.value <= 0.8 && z.value > 0.7);
    }

    #[test]
    fn curvature_floor_of_log_concave_is_zero() {
        assert_eq!(curvature_floor(&line(-5.0, 5.0, 200, |x| -0.5 * x * x)).unwrap(), 0.0);
        assert!(curvature_floor(&line(-5.0, 5.0, 200, |x| (2.0 * x).cos())).unwrap() > 3.0);
    }
}
