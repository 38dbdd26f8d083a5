//! Quadrature rules and Gaussian-line expectations of `log cosh` and its
//! derivatives.
//!
//! The population potential only ever needs one-dimensional expectations
//! `E f(μ + σZ)` with `Z ~ N(0, 1)`. For narrow lines (`σ` below
//! [`WIDE_LINE`]) a Gauss–Hermite rule is used directly. Once `σ` grows the
//! integrand varies on a scale `1/σ` in `Z` and Gauss–Hermite loses digits, so
//! the integrand is split into a piece with a closed-form expectation
//! (`|t|`, `sign t`) and an exponentially decaying remainder integrated in
//! `t` with a composite Gauss–Legendre rule, broken at the kink `t = 0`.

use std::f64::consts::{FRAC_2_SQRT_PI, LN_2, PI, SQRT_2};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Lines with `σ` above this use the split composite rule.
pub const WIDE_LINE: f64 = 0.5;
/// Default Gauss–Hermite order.
pub const DEFAULT_NODES: usize = 64;
/// Gauss–Hermite order used for regression and oracle runs.
pub const ORACLE_NODES: usize = 256;

const MAX_NODES: usize = 300;
// e^{-2·19} is below f64 resolution relative to O(1) integrands.
const DECAY_CUTOFF: f64 = 19.0;
const PANEL: f64 = 1.0;
const LEGENDRE_ORDER: usize = 12;

/// Nodes and weights for `∫ f(x) e^{-x²} dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Golub–Welsch for the starting nodes, then Newton polishing on the
    /// orthonormal recurrence and Christoffel weights `1/Σ p_k(x)²`.
    pub fn new(n: usize) -> Result<Self> {
        if !(1..=MAX_NODES).contains(&n) {
            return Err(Error::invalid("nodes", format!("{n} not in 1..={MAX_NODES}")));
        }
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let off = (k as f64 / 2.0).sqrt();
            jacobi[(k - 1, k)] = off;
            jacobi[(k, k - 1)] = off;
        }
        let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
        nodes.sort_by(f64::total_cmp);

        let mut weights = Vec::with_capacity(n);
        for x in nodes.iter_mut() {
            for _ in 0..4 {
                let (pn, pn1, _) = hermite_orthonormal(n, *x);
                let deriv = (2.0 * n as f64).sqrt() * pn1;
                if deriv == 0.0 {
                    break;
                }
                let step = pn / deriv;
                *x -= step;
                if step.abs() <= 1e-15 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, _, sumsq) = hermite_orthonormal(n, *x);
            weights.push(1.0 / sumsq);
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ f(x) e^{-x²} dx`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// `E f(Z)` for a standard normal `Z`.
    pub fn expect_standard_normal(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.integrate(|x| f(SQRT_2 * x)) / PI.sqrt()
    }
}

/// Returns `(p_n(x), p_{n-1}(x), Σ_{k<n} p_k(x)²)` for the orthonormal
/// Hermite polynomials.
fn hermite_orthonormal(n: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    let mut sumsq = 0.0;
    for k in 0..n {
        sumsq += cur * cur;
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev, sumsq)
}

/// Nodes and weights for `∫_{-1}^{1} f(x) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("order", "must be at least 1"));
        }
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let nf = n as f64;
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        Ok(Self { nodes, weights })
    }

    /// `∫_a^b f(t) dt`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Expectations over `t = μ + σZ`, `Z ~ N(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LineMoments {
    /// `E log cosh t`
    pub logcosh: f64,
    /// `E tanh t`
    pub tanh: f64,
    /// `E sech² t`
    pub sech2: f64,
    /// `E[sech² t · Z]`
    pub sech2_z: f64,
    /// `E[sech² t · Z²]`
    pub sech2_z2: f64,
}

/// Evaluates [`LineMoments`] with a fixed Gauss–Hermite order.
#[derive(Debug, Clone)]
pub struct GaussianLine {
    hermite: GaussHermite,
    legendre: GaussLegendre,
}

impl GaussianLine {
    pub fn new(nodes: usize) -> Result<Self> {
        if nodes < 8 {
            return Err(Error::invalid("nodes", "at least 8 quadrature nodes are required"));
        }
        Ok(Self {
            hermite: GaussHermite::new(nodes)?,
            legendre: GaussLegendre::new(LEGENDRE_ORDER)?,
        })
    }

    pub fn nodes(&self) -> usize {
        self.hermite.len()
    }

    pub fn moments(&self, mu: f64, sigma: f64) -> LineMoments {
        debug_assert!(sigma >= 0.0);
        if sigma == 0.0 {
            let s = sech2(mu);
            return LineMoments {
                logcosh: crate::mixture::logcosh(mu),
                tanh: mu.tanh(),
                sech2: s,
                sech2_z: 0.0,
                sech2_z2: s,
            };
        }
        if sigma <= WIDE_LINE {
            self.narrow(mu, sigma)
        } else {
            self.wide(mu, sigma)
        }
    }

    /// `E log cosh(μ + σZ)` only.
    pub fn expect_logcosh(&self, mu: f64, sigma: f64) -> f64 {
        self.moments(mu, sigma).logcosh
    }

    fn narrow(&self, mu: f64, sigma: f64) -> LineMoments {
        let mut m = LineMoments::default();
        for (&x, &w) in self.hermite.nodes.iter().zip(&self.hermite.weights) {
            let z = SQRT_2 * x;
            let t = mu + sigma * z;
            let s = sech2(t);
            m.logcosh += w * crate::mixture::logcosh(t);
            m.tanh += w * t.tanh();
            m.sech2 += w * s;
            m.sech2_z += w * s * z;
            m.sech2_z2 += w * s * z * z;
        }
        let scale = 1.0 / PI.sqrt();
        m.logcosh *= scale;
        m.tanh *= scale;
        m.sech2 *= scale;
        m.sech2_z *= scale;
        m.sech2_z2 *= scale;
        m
    }

    fn wide(&self, mu: f64, sigma: f64) -> LineMoments {
        let r = mu / (sigma * SQRT_2);
        let e_sign = libm::erf(r);
        let e_abs = sigma * FRAC_2_SQRT_PI / SQRT_2 * (-r * r).exp() + mu * e_sign;

        // Remainders decay like e^{-2|t|}; the Gaussian is negligible beyond 10σ.
        let lo = (mu - 10.0 * sigma).max(-DECAY_CUTOFF);
        let hi = (mu + 10.0 * sigma).min(DECAY_CUTOFF);
        let inv_sigma = 1.0 / sigma;
        let norm = inv_sigma / (2.0 * PI).sqrt();
        let mut acc = [0.0f64; 5];
        let mut add_range = |a: f64, b: f64| {
            if b <= a {
                return;
            }
            let panels = ((b - a) / PANEL).ceil().max(1.0) as usize;
            let width = (b - a) / panels as f64;
            for p in 0..panels {
                let pa = a + p as f64 * width;
                let half = 0.5 * width;
                let mid = pa + half;
                for (&x, &w) in self.legendre.nodes.iter().zip(&self.legendre.weights) {
                    let t = mid + half * x;
                    let z = (t - mu) * inv_sigma;
                    let g = w * half * norm * (-0.5 * z * z).exp();
                    let e = (-2.0 * t.abs()).exp();
                    let s = 4.0 * e / ((1.0 + e) * (1.0 + e));
                    acc[0] += g * e.ln_1p();
                    acc[1] += g * (-t.signum() * 2.0 * e / (1.0 + e));
                    acc[2] += g * s;
                    acc[3] += g * s * z;
                    acc[4] += g * s * z * z;
                }
            }
        };
        add_range(lo, hi.min(0.0));
        add_range(lo.max(0.0), hi);

        LineMoments {
            logcosh: e_abs - LN_2 + acc[0],
            tanh: e_sign + acc[1],
            sech2: acc[2],
            sech2_z: acc[3],
            sech2_z2: acc[4],
        }
    }
}

#[inline]
fn sech2(t: f64) -> f64 {
    let e = (-2.0 * t.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hermite_integrates_polynomials() {
        let q = GaussHermite::new(10).unwrap();
        assert_relative_eq!(q.integrate(|_| 1.0), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(q.integrate(|x| x * x), PI.sqrt() / 2.0, max_relative = 1e-13);
        assert_relative_eq!(q.expect_standard_normal(|z| z.powi(4)), 3.0, max_relative = 1e-12);
    }

    #[test]
    fn hermite_high_order_is_normalised() {
        for n in [64, 256] {
            let q = GaussHermite::new(n).unwrap();
            assert_relative_eq!(q.expect_standard_normal(|_| 1.0), 1.0, max_relative = 1e-13);
            assert_relative_eq!(q.expect_standard_normal(|z| z * z), 1.0, max_relative = 1e-12);
            assert_relative_eq!(q.expect_standard_normal(|z| z.cos()), (-0.5f64).exp(), max_relative = 1e-12);
        }
    }

    #[test]
    fn legendre_integrates() {
        let q = GaussLegendre::new(12).unwrap();
        assert_relative_eq!(q.integrate(0.0, PI, f64::sin), 2.0, max_relative = 1e-14);
        assert_relative_eq!(q.integrate(-1.0, 2.0, |x| x.powi(23)), (2f64.powi(24) - 1.0) / 24.0, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(GaussHermite::new(0).is_err());
        assert!(GaussLegendre::new(0).is_err());
        assert!(GaussianLine::new(4).is_err());
    }

    // Reference values from a 40-digit adaptive quadrature, split at the kink.
    #[test]
    fn line_moments_match_high_precision_values() {
        let line = GaussianLine::new(DEFAULT_NODES).unwrap();
        let cases = [
            (4.0, 2.0, 3.367_279_806_263_133, f64::NAN, f64::NAN),
            (0.0, 8.5, 6.127_321_403_829_014, 0.0, 0.093_340_762_265_026_18),
            (12.0, 8.5, 11.928_540_578_406_488, 0.839_623_472_049_158_5, 0.034_844_101_712_125_54),
            (0.3, 0.2, 0.062_378_661_429_809_71, 0.281_330_839_888_066_7, 0.889_044_384_777_847_7),
            (25.0, 30.0, 31.112_874_314_173_28, 0.595_128_708_050_302_2, 0.018_791_499_188_349_47),
        ];
        for (mu, sigma, lc, th, s2) in cases {
            let m = line.moments(mu, sigma);
            assert_relative_eq!(m.logcosh, lc, max_relative = 1e-12);
            if th.is_finite() {
                assert!((m.tanh - th).abs() < 1e-12, "tanh at ({mu},{sigma})");
                assert_relative_eq!(m.sech2, s2, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn narrow_and_wide_branches_agree_at_switch() {
        let line = GaussianLine::new(DEFAULT_NODES).unwrap();
        for mu in [0.0, 0.4, 1.7, -3.0] {
            let a = line.narrow(mu, WIDE_LINE);
            let b = line.wide(mu, WIDE_LINE);
            assert!((a.logcosh - b.logcosh).abs() < 1e-13);
            assert!((a.tanh - b.tanh).abs() < 1e-13);
            assert!((a.sech2 - b.sech2).abs() < 1e-13, "{mu}: {} vs {}", a.sech2, b.sech2);
            assert!((a.sech2_z - b.sech2_z).abs() < 1e-13, "{mu}: {} vs {}", a.sech2_z, b.sech2_z);
            assert!((a.sech2_z2 - b.sech2_z2).abs() < 1e-13, "{mu}: {} vs {}", a.sech2_z2, b.sech2_z2);
        }
    }

    #[test]
    fn stein_identity_links_moments() {
        // E[tanh(μ+σZ)·Z] = σ·E[sech²(μ+σZ)], so d/dσ E logcosh = σ E sech².
        let line = GaussianLine::new(DEFAULT_NODES).unwrap();
        for (mu, sigma) in [(0.5, 0.3), (2.0, 1.5), (-1.0, 6.0)] {
            let h = 1e-5;
            let fd = (line.expect_logcosh(mu, sigma + h) - line.expect_logcosh(mu, sigma - h)) / (2.0 * h);
            let m = line.moments(mu, sigma);
            assert_relative_eq!(fd, sigma * m.sech2, max_relative = 1e-7);
        }
    }
}
