//! The symmetric two-component location mixture `½N(θ₀, I) + ½N(−θ₀, I)`.

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::rng::{self, Stream};

const LN_2: f64 = std::f64::consts::LN_2;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

/// `log cosh(t)` without overflow: `|t| + log1p(e^{-2|t|}) - log 2`.
#[inline]
pub fn logcosh(t: f64) -> f64 {
    let a = t.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// Generative model with component means `±θ₀` and identity covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    theta0: Vec<f64>,
}

impl MixtureSpec {
    pub fn new(theta0: Vec<f64>) -> Result<Self> {
        if theta0.is_empty() {
            return Err(Error::invalid("theta0", "dimension must be at least 1"));
        }
        if theta0.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("theta0", "entries must be finite"));
        }
        Ok(Self { theta0 })
    }

    /// `θ₀ = a·e₁` in dimension `d`.
    pub fn along_first_axis(d: usize, a: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("d", "dimension must be at least 1"));
        }
        let mut theta0 = vec![0.0; d];
        theta0[0] = a;
        Self::new(theta0)
    }

    pub fn dim(&self) -> usize {
        self.theta0.len()
    }

    pub fn theta0(&self) -> &[f64] {
        &self.theta0
    }

    pub fn theta0_norm(&self) -> f64 {
        norm(&self.theta0)
    }

    pub fn density(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let d = self.dim() as f64;
        let norm_const = (-d * HALF_LN_2PI).exp();
        let plus: f64 = x.iter().zip(&self.theta0).map(|(a, b)| (a - b) * (a - b)).sum();
        let minus: f64 = x.iter().zip(&self.theta0).map(|(a, b)| (a + b) * (a + b)).sum();
        Ok(0.5 * norm_const * ((-0.5 * plus).exp() + (-0.5 * minus).exp()))
    }

    /// `−(d/2)log 2π − (‖x‖² + ‖θ₀‖²)/2 + logcosh(θ₀ᵀx)`.
    pub fn log_density(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(log_component_sum(&self.theta0, x))
    }
}

/// `log(½φ(x; θ, I) + ½φ(x; −θ, I))`, symmetric in `(θ, x)`.
pub(crate) fn log_component_sum(theta: &[f64], x: &[f64]) -> f64 {
    let d = theta.len() as f64;
    -d * HALF_LN_2PI - 0.5 * (dot(x, x) + dot(theta, theta)) + logcosh(dot(theta, x))
}

/// Contaminating distribution `F` in `Q = (1−γ)P₀ + γF`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Noise {
    /// `N(mean, K² I)`.
    Gaussian { mean: Vec<f64> },
    PointMass { at: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContaminationSpec {
    pub gamma: f64,
    pub noise: Noise,
    /// Sub-Gaussian scale of the noise; also the standard deviation of the
    /// Gaussian option.
    pub k: f64,
}

impl ContaminationSpec {
    pub fn new(gamma: f64, noise: Noise, k: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::invalid("gamma", format!("{gamma} is outside [0, 1]")));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::invalid("k", "must be positive and finite"));
        }
        let v = match &noise {
            Noise::Gaussian { mean } => mean,
            Noise::PointMass { at } => at,
        };
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("noise", "location must be finite"));
        }
        Ok(Self { gamma, noise, k })
    }

    fn location(&self) -> &[f64] {
        match &self.noise {
            Noise::Gaussian { mean } => mean,
            Noise::PointMass { at } => at,
        }
    }
}

/// Row-major `n × d` sample matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    d: usize,
    values: Vec<f64>,
}

impl Dataset {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map(Vec::len).ok_or(Error::EmptyDataset)?;
        if d == 0 {
            return Err(Error::invalid("data", "rows must have at least one column"));
        }
        let mut values = Vec::with_capacity(d * rows.len());
        for r in rows {
            check_dim(d, r.len())?;
            values.extend_from_slice(r);
        }
        Ok(Self { d, values })
    }

    pub fn from_flat(d: usize, values: Vec<f64>) -> Result<Self> {
        if d == 0 || values.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if !values.len().is_multiple_of(d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: values.len() % d,
            });
        }
        Ok(Self { d, values })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.d)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }

    /// First `n` rows, which keeps nested sample-size sweeps coupled.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::invalid("n", format!("{n} not in 1..={}", self.len())));
        }
        Ok(Self {
            d: self.d,
            values: self.values[..n * self.d].to_vec(),
        })
    }
}

/// Draws `n` i.i.d. points from `(1−γ)P₀ + γF`.
///
/// Every point consumes the same random numbers whatever `γ` is (a uniform
/// selector, a sign, a mixture noise vector and a contamination noise vector),
/// so datasets generated with one seed and different `γ` are coupled and the
/// contaminated set grows monotonically with `γ`.
pub fn sample_data(
    spec: &MixtureSpec,
    contamination: Option<&ContaminationSpec>,
    n: usize,
    seed: u64,
) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    let d = spec.dim();
    if let Some(c) = contamination {
        check_dim(d, c.location().len())?;
    }
    let mut rng = rng::stream(seed, Stream::Data);
    let mut values = Vec::with_capacity(n * d);
    let mut clean = vec![0.0; d];
    let mut noisy = vec![0.0; d];
    for _ in 0..n {
        let u: f64 = rng.random();
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        for (j, c) in clean.iter_mut().enumerate() {
            let z: f64 = rng.sample(StandardNormal);
            *c = sign * spec.theta0[j] + z;
        }
        for v in noisy.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        match contamination {
            Some(c) if u < c.gamma => match &c.noise {
                Noise::Gaussian { mean } => {
                    values.extend(mean.iter().zip(&noisy).map(|(m, z)| m + c.k * z))
                }
                Noise::PointMass { at } => values.extend_from_slice(at),
            },
            _ => values.extend_from_slice(&clean),
        }
    }
    Dataset::from_flat(d, values)
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
