//! Exact cell-to-cell discretisation of the one-dimensional random-walk
//! kernels, their s-conductance, and the rejection/overlap bounds for the
//! continuous kernel near the origin.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::density::GridDensity;
use super::report::{LemmaReport, MarginTracker, LEMMA_TOL};
use crate::diagnostics::{tail_radius, Level};
use crate::error::{Error, Result};
use crate::grid::{Axis, Grid};
use crate::potential::{Potential, PowerPosterior};
use crate::quadrature::GaussLegendre;
use crate::rng::{self, Stream};
use crate::sampler::Algorithm;

/// Row-stochastic transition matrix on the cells of a 1-D grid together with
/// the grid masses it is reversible for.
#[derive(Debug, Clone, PartialEq)]
pub struct GridKernel {
    axis: Axis,
    m: usize,
    /// Row-major `m × m`.
    matrix: Vec<f64>,
    logmass: Vec<f64>,
    stationary: Vec<f64>,
}

/// Mass that `N(0, η)` puts on the cell at offset `k` (in cells) from the
/// origin cell.
fn offset_masses(m: usize, h: f64, eta: f64) -> Vec<f64> {
    let mut g = vec![0.0; m];
    for (k, gk) in g.iter_mut().enumerate() {
        let lo = (k as f64 - 0.5) * h / (2.0 * eta).sqrt();
        let hi = (k as f64 + 0.5) * h / (2.0 * eta).sqrt();
        *gk = if k == 0 {
            libm::erf(hi)
        } else {
            0.5 * (libm::erfc(lo) - libm::erfc(hi))
        };
    }
    g
}

impl GridKernel {
    /// Kernel of [`crate::sampler`]'s reflected (or plain) random walk
    /// targeting the cell masses `∝ exp(logw)`. Proposal mass leaving the
    /// grid is rejected.
    pub fn from_log_weights(axis: Axis, logw: Vec<f64>, eta: f64, algorithm: Algorithm) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::invalid("eta", "must be positive and finite"));
        }
        if algorithm == Algorithm::Rmrw && !axis.is_symmetric() {
            return Err(Error::Precondition("reflection needs a grid symmetric about 0".into()));
        }
        let gd = GridDensity::from_log_weights(Grid::line(axis), logw)?;
        let m = axis.points;
        let g = offset_masses(m, axis.width(), eta);
        let q = |i: usize, j: usize| {
            let plain = g[i.abs_diff(j)];
            match algorithm {
                Algorithm::Mrw => plain,
                Algorithm::Rmrw => 0.5 * plain + 0.5 * g[i.abs_diff(m - 1 - j)],
            }
        };
        let l = gd.logmass();
        let mut matrix = vec![0.0; m * m];
        for i in 0..m {
            let row = &mut matrix[i * m..(i + 1) * m];
            let mut moved = 0.0;
            for j in 0..m {
                if j != i {
                    let accept = (l[j] - l[i]).min(0.0).exp();
                    row[j] = if l[i].is_finite() { q(i, j) * accept } else { q(i, j) };
                    moved += row[j];
                }
            }
            row[i] = 1.0 - moved;
        }
        Ok(Self {
            axis,
            m,
            matrix,
            logmass: l.to_vec(),
            stationary: gd.mass().to_vec(),
        })
    }

    /// A kernel given directly by its matrix and stationary masses.
    pub fn from_matrix(axis: Axis, matrix: Vec<f64>, stationary: Vec<f64>) -> Result<Self> {
        let m = axis.points;
        if matrix.len() != m * m || stationary.len() != m {
            return Err(Error::invalid("kernel", "matrix must be m × m with m stationary masses"));
        }
        let logw = stationary.iter().map(|p| p.ln()).collect();
        let gd = GridDensity::from_log_weights(Grid::line(axis), logw)?;
        Ok(Self {
            axis,
            m,
            matrix,
            logmass: gd.logmass().to_vec(),
            stationary: gd.mass().to_vec(),
        })
    }

    pub fn axis(&self) -> &Axis {
        &self.axis
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.m + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.matrix[i * self.m..(i + 1) * self.m]
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn row_sum_error(&self) -> f64 {
        (0..self.m)
            .map(|i| (self.row(i).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `max |π(x)T(x,y) − π(y)T(y,x)|`.
    pub fn detailed_balance_residual(&self) -> f64 {
        let p = &self.stationary;
        let mut worst: f64 = 0.0;
        for i in 0..self.m {
            for j in i + 1..self.m {
                worst = worst.max((p[i] * self.entry(i, j) - p[j] * self.entry(j, i)).abs());
            }
        }
        worst
    }

    /// `‖πT − π‖₁`.
    pub fn stationarity_residual(&self) -> f64 {
        let p = &self.stationary;
        (0..self.m)
            .map(|j| ((0..self.m).map(|i| p[i] * self.entry(i, j)).sum::<f64>() - p[j]).abs())
            .sum()
    }

    /// Largest modulus among the eigenvalues other than the leading 1.
    pub fn second_eigenvalue_modulus(&self) -> f64 {
        let l = &self.logmass;
        // Π^{1/2} T Π^{−1/2} written so that no mass ratio is formed.
        let a = DMatrix::from_fn(self.m, self.m, |i, j| {
            if i == j {
                self.entry(i, i)
            } else if self.entry(i, j) == 0.0 {
                0.0
            } else {
                let sym = self.entry(i, j) * ((l[i] - l[j]) / 2.0).exp();
                let other = self.entry(j, i) * ((l[j] - l[i]) / 2.0).exp();
                0.5 * (sym + other)
            }
        });
        let mut ev: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
        ev.sort_by(|x, y| y.total_cmp(x));
        ev[1..].iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// `Φ_s = min flow(S → Sᶜ)/(π(S) − s)` over intervals, half-lines and,
    /// on symmetric grids, mirrored interval pairs `I ∪ −I`, restricted to
    /// `s < π(S) ≤ ½`. `None` means every admissible set has zero outflow.
    pub fn s_conductance(&self, s: f64) -> Result<Option<f64>> {
        if !(0.0..0.5).contains(&s) {
            return Err(Error::Precondition(format!("no admissible set for s = {s}")));
        }
        let m = self.m;
        let p = &self.stationary;
        // Prefix sums of the flow matrix F_xy = π_x T_xy along each row.
        let mut pre = vec![0.0; m * (m + 1)];
        for x in 0..m {
            let base = x * (m + 1);
            for y in 0..m {
                pre[base + y + 1] = pre[base + y] + p[x] * self.entry(x, y);
            }
        }
        let flow_into = |x: usize, lo: usize, hi: usize| pre[x * (m + 1) + hi + 1] - pre[x * (m + 1) + lo];
        let mut mass_pre = vec![0.0; m + 1];
        for i in 0..m {
            mass_pre[i + 1] = mass_pre[i] + p[i];
        }
        let half = 0.5 * (1.0 + 1e-12);
        let mut best = f64::INFINITY;
        let mut admissible = false;
        let mut consider = |mass: f64, flow: f64| {
            if mass > s && mass <= half {
                admissible = true;
                best = best.min(flow.max(0.0) / (mass - s));
            }
        };
        for lo in 0..m {
            for hi in lo..m {
                if lo == 0 && hi == m - 1 {
                    continue;
                }
                let mass = mass_pre[hi + 1] - mass_pre[lo];
                let flow: f64 = (lo..=hi).map(|x| p[x] - flow_into(x, lo, hi)).sum();
                consider(mass, flow);
            }
        }
        if self.axis.is_symmetric() {
            for lo in m.div_ceil(2)..m {
                for hi in lo..m {
                    let (mlo, mhi) = (m - 1 - hi, m - 1 - lo);
                    let mass = mass_pre[hi + 1] - mass_pre[lo] + mass_pre[mhi + 1] - mass_pre[mlo];
                    let flow: f64 = (lo..=hi)
                        .chain(mlo..=mhi)
                        .map(|x| p[x] - flow_into(x, lo, hi) - flow_into(x, mlo, mhi))
                        .sum();
                    consider(mass, flow);
                }
            }
        }
        if !admissible {
            return Err(Error::Precondition(format!("no set with {s} < π(S) ≤ ½")));
        }
        Ok(if best > 0.0 { Some(best) } else { None })
    }
}

/// Grid kernel for a one-dimensional power posterior at the chosen level.
/// The grid must be symmetric and cover `R_{0.001}`.
pub fn build_grid_kernel(
    pp: &PowerPosterior,
    level: Level,
    eta: f64,
    axis: Axis,
    algorithm: Algorithm,
) -> Result<GridKernel> {
    if pp.dim() != 1 {
        return Err(Error::Unsupported(format!("grid kernels need d = 1, got {}", pp.dim())));
    }
    let r = tail_radius(1, pp.spec().theta0_norm(), pp.beta(), 1e-3)?;
    if !Grid::line(axis).covers_ball(r) {
        return Err(Error::Precondition(format!("grid does not cover R_0.001 = {r:.4}")));
    }
    let logw: Vec<f64> = match level {
        Level::Empirical => {
            if pp.data().is_none() {
                return Err(Error::EmptyDataset);
            }
            axis.centers().iter().map(|&x| -pp.value(&[x])).collect()
        }
        Level::Population => {
            let u = pp.population();
            axis.centers().iter().map(|&x| -u.value(&[x])).collect()
        }
    };
    GridKernel::from_log_weights(axis, logw, eta, algorithm)
}

pub fn build_rmrw_grid_kernel(pp: &PowerPosterior, level: Level, eta: f64, axis: Axis) -> Result<GridKernel> {
    build_grid_kernel(pp, level, eta, axis, Algorithm::Rmrw)
}

/// Total-variation quantities of the continuous reflected kernel `T` and its
/// proposal `P` at a pair of nearby points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Overlap {
    pub x: f64,
    pub y: f64,
    /// `TV(T_x, P_x)`, which equals the rejection probability at `x`.
    pub tv_kernel_proposal: f64,
    pub tv_kernels: f64,
}

impl Overlap {
    pub fn margin(&self) -> f64 {
        (0.1 - self.tv_kernel_proposal).min(0.5 - self.tv_kernels)
    }
}

/// Largest step size the overlap bounds are stated for, with `A = M`.
pub fn overlap_step_limit(radius: f64, d: usize) -> f64 {
    let span = 2.0 * radius + (d as f64).sqrt();
    1.0 / (400.0 * span * span)
}

/// Overlap of the population-level reflected kernels at `x` and `y`;
/// `Ok(None)` when the pair violates the preconditions.
pub fn kernel_overlap(pp: &PowerPosterior, eta: f64, x: f64, y: f64, radius: f64) -> Result<Option<Overlap>> {
    if pp.dim() != 1 {
        return Err(Error::Unsupported("kernel overlap needs d = 1".into()));
    }
    let se = eta.sqrt();
    if !(eta > 0.0)
        || eta > overlap_step_limit(radius, 1)
        || (x - y).abs().max((x + y).abs()) > se / 10.0
        || x.abs() > radius
        || y.abs() > radius
    {
        return Ok(None);
    }
    let u = pp.population();
    let (ux, uy) = (u.value(&[x]), u.value(&[y]));
    let phi = |z: f64, c: f64| (-(z - c) * (z - c) / (2.0 * eta)).exp() / (2.0 * std::f64::consts::PI * eta).sqrt();
    let p = |z: f64, c: f64| 0.5 * phi(z, c) + 0.5 * phi(z, -c);

    let reach = x.abs().max(y.abs()) + 12.0 * se;
    let rule = GaussLegendre::new(12)?;
    let panels = 480;
    let width = 2.0 * reach / panels as f64;
    let (mut rej_x, mut rej_y, mut diff) = (0.0, 0.0, 0.0);
    for k in 0..panels {
        let a = -reach + k as f64 * width;
        let (rx, ry, df) = {
            let mut acc = (0.0, 0.0, 0.0);
            let nodes = rule.nodes().iter().zip(rule.weights());
            for (&t, &w) in nodes {
                let z = a + 0.5 * width * (t + 1.0);
                let uz = u.value(&[z]);
                let (px, py) = (p(z, x), p(z, y));
                let (ax, ay) = ((ux - uz).min(0.0).exp(), (uy - uz).min(0.0).exp());
                let wz = 0.5 * width * w;
                acc.0 += wz * px * (1.0 - ax);
                acc.1 += wz * py * (1.0 - ay);
                acc.2 += wz * (px * ax - py * ay).abs();
            }
            acc
        };
        rej_x += rx;
        rej_y += ry;
        diff += df;
    }
    let tv_kernels = if x == y { 0.0 } else { 0.5 * (diff + rej_x + rej_y) };
    Ok(Some(Overlap {
        x,
        y,
        tv_kernel_proposal: rej_x,
        tv_kernels: tv_kernels.min(1.0),
    }))
}

/// `count` pairs drawn uniformly from `max(|x−y|, |x+y|) ≤ √η/10`.
pub fn admissible_pairs(eta: f64, count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = rng::stream(seed, Stream::Lab);
    let r = eta.sqrt() / 10.0;
    (0..count)
        .map(|_| loop {
            let x = rng.random_range(-r..=r);
            let y = rng.random_range(-r..=r);
            if x.abs() + y.abs() <= r {
                break (x, y);
            }
        })
        .collect()
}

pub fn check_kernel_overlap(
    pp: &PowerPosterior,
    eta: f64,
    pairs: &[(f64, f64)],
    radius: f64,
    seed: Option<u64>,
) -> Result<LemmaReport> {
    let mut t = MarginTracker::new("kernel_overlap", LEMMA_TOL);
    let mut worst_reject: f64 = 0.0;
    let mut worst_overlap: f64 = 0.0;
    for &(x, y) in pairs {
        match kernel_overlap(pp, eta, x, y, radius)? {
            Some(o) => {
                worst_reject = worst_reject.max(o.tv_kernel_proposal);
                worst_overlap = worst_overlap.max(o.tv_kernels);
                t.record(o.margin(), || json!(o));
            }
            None => t.skip(),
        }
    }
    t.detail("max_tv_kernel_proposal", worst_reject);
    t.detail("max_tv_kernels", worst_overlap);
    t.detail("eta", eta);
    t.finish(seed, None)
}
