//! Randomised test densities for the inequality sweeps.

use rand::Rng as _;

use super::density::GridDensity;
use crate::error::Result;
use crate::grid::{Axis, Grid};
use crate::rng::Rng;

/// Mixture of one to three Gaussians with means in `[−3, 3]`.
pub fn random_mixture_1d(rng: &mut Rng, axis: Axis) -> Result<GridDensity> {
    let k = rng.random_range(1..=3usize);
    let comps: Vec<(f64, f64, f64)> = (0..k)
        .map(|_| {
            (
                rng.random_range(0.2..1.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(0.3..1.5),
            )
        })
        .collect();
    GridDensity::from_log_density(Grid::line(axis), |x| {
        let v: f64 = comps
            .iter()
            .map(|&(w, m, s): &(f64, f64, f64)| w / s * (-0.5 * ((x[0] - m) / s).powi(2)).exp())
            .sum();
        v.ln()
    })
}

/// Unimodal, generally not log-concave, density on `[0, a]`.
pub fn random_unimodal(rng: &mut Rng, a: f64, points: usize) -> Result<GridDensity> {
    let axis = Axis::new(0.0, a, points)?;
    let mode = rng.random_range(0.0..a);
    let family = rng.random_range(0..4u8);
    let (left, right) = (rng.random_range(0.05..0.6) * a, rng.random_range(0.05..0.6) * a);
    let q = rng.random_range(0.4..4.0);
    let plateau = rng.random_range(0.0..0.2) * a;
    GridDensity::from_log_density(Grid::line(axis), move |x| {
        let t = x[0] - mode;
        let s = if t < 0.0 { left } else { right };
        match family {
            // Generalised normal with separate scales on each side.
            0 => -(t.abs() / s).powf(q),
            // Triangle.
            1 => (1.0 - t.abs() / (2.0 * s)).max(1e-12).ln(),
            // Flat top with Cauchy-like flanks.
            2 => -((t.abs() - plateau).max(0.0) / s).powi(2).ln_1p(),
            // Exponential spike.
            _ => -t.abs() / s,
        }
    })
}

/// Smooth positive 2-D density: a rotated Gaussian with random cubic and
/// quartic log-perturbations, on `[−r, r]²`.
pub fn random_nonproduct_2d(rng: &mut Rng, r: f64, points: usize) -> Result<GridDensity> {
    let axis = Axis::symmetric(r, points)?;
    let angle = rng.random_range(0.0..std::f64::consts::PI);
    let (l1, l2) = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
    let (c, s) = (angle.cos(), angle.sin());
    let p = [
        l1 * c * c + l2 * s * s,
        (l1 - l2) * c * s,
        l1 * s * s + l2 * c * c,
    ];
    let cubic: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
    GridDensity::from_log_density(Grid::plane(axis, axis), move |x| {
        let (u, v) = (x[0], x[1]);
        let quad = 0.5 * (p[0] * u * u + 2.0 * p[1] * u * v + p[2] * v * v);
        let cub = cubic[0] * u * u * u + cubic[1] * u * u * v + cubic[2] * u * v * v + cubic[3] * v * v * v;
        -quad + 0.025 * cub - 0.01 * (u.powi(4) + v.powi(4))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};
    use crate::theory::unimodality_violation;

    #[test]
    fn unimodal_family_is_unimodal() {
        let mut rng = stream(1, Stream::Lab);
        for _ in 0..40 {
            let d = random_unimodal(&mut rng, 3.0, 600).unwrap();
            assert!(unimodality_violation(d.mass()).0 <= 1e-9);
        }
    }

    #[test]
    fn nonproduct_is_positive() {
        let mut rng = stream(2, Stream::Lab);
        let d = random_nonproduct_2d(&mut rng, 4.0, 40).unwrap();
        assert!(d.mass().iter().all(|&m| m > 0.0));
    }
}
