//! Empirical and population potentials of the power posterior.
//!
//! The target is `π(θ) ∝ exp(−U(θ))` with
//!
//! ```text
//! U(θ)  = β(‖θ‖²/2 − (1/n) Σᵢ log cosh(θᵀXᵢ)) − log λ(θ)
//! U₀(θ) = β(‖θ‖²/2 − E log cosh(θᵀX))          − log λ(θ)
//! ```
//!
//! i.e. the negative power log-likelihood with θ-independent constants
//! dropped. The population expectation reduces exactly to a one-dimensional
//! Gaussian line: for `X = τθ₀ + ξ`, `θᵀX` has the law of `μ + σZ` up to a
//! sign, with `μ = θᵀθ₀` and `σ = ‖θ‖`, and `log cosh` is even.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::mixture::{dot, logcosh, norm, Dataset, MixtureSpec};
use crate::quadrature::{GaussianLine, LineMoments, DEFAULT_NODES};

/// Largest dimension for which dense Hessians are formed.
pub const MAX_HESSIAN_DIM: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriorSpec {
    /// `λ(θ) = 1`.
    UniformImproper,
    /// `N(0, σ² I)`.
    Gaussian { sigma: f64 },
}

impl PriorSpec {
    fn validate(&self) -> Result<()> {
        match *self {
            PriorSpec::Gaussian { sigma } if !(sigma > 0.0 && sigma.is_finite()) => {
                Err(Error::invalid("sigma", "prior scale must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// `−log λ(θ)` up to a constant.
    fn value(&self, theta: &[f64]) -> f64 {
        match *self {
            PriorSpec::UniformImproper => 0.0,
            PriorSpec::Gaussian { sigma } => dot(theta, theta) / (2.0 * sigma * sigma),
        }
    }

    fn precision(&self) -> f64 {
        match *self {
            PriorSpec::UniformImproper => 0.0,
            PriorSpec::Gaussian { sigma } => 1.0 / (sigma * sigma),
        }
    }
}

/// Anything the samplers can target: `π ∝ exp(−value)`.
pub trait Potential: Sync {
    fn dim(&self) -> usize;
    /// Unchecked evaluation; callers guarantee `theta.len() == dim()`.
    fn value(&self, theta: &[f64]) -> f64;
}

/// Which right-hand side a dissipativity margin is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DissipativityBound {
    /// `(β/2)‖θ‖² − β(‖θ₀‖² + 1)` for `U₀`.
    Population,
    /// `(β/2)‖θ‖² − 2β(‖θ₀‖² + 1)` for `U`.
    Empirical,
    /// `(β/2)‖θ‖² − 2β(‖θ₀‖² + 1 + γ d K² log(n/δ))` for `U` on contaminated data.
    Contaminated { gamma: f64, k: f64, delta: f64 },
}

#[derive(Debug, Clone)]
pub struct PowerPosterior {
    spec: MixtureSpec,
    data: Option<Dataset>,
    beta: f64,
    prior: PriorSpec,
    line: GaussianLine,
}

impl PowerPosterior {
    /// Power posterior for an observed dataset. `β > n` is accepted with a
    /// logged warning.
    pub fn new(spec: MixtureSpec, data: Dataset, beta: f64, prior: PriorSpec) -> Result<Self> {
        check_dim(spec.dim(), data.dim())?;
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let pp = Self::population_only(spec, beta, prior)?;
        if beta > data.len() as f64 {
            log::warn!("beta = {beta} exceeds the sample size n = {}", data.len());
        }
        Ok(Self { data: Some(data), ..pp })
    }

    /// Posterior with no dataset; only population-level operations work.
    pub fn population_only(spec: MixtureSpec, beta: f64, prior: PriorSpec) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::invalid("beta", format!("{beta} must be positive and finite")));
        }
        prior.validate()?;
        Ok(Self {
            spec,
            data: None,
            beta,
            prior,
            line: GaussianLine::new(DEFAULT_NODES)?,
        })
    }

    /// Replaces the Gauss–Hermite order used by population operations.
    pub fn with_quadrature_nodes(mut self, nodes: usize) -> Result<Self> {
        self.line = GaussianLine::new(nodes)?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn prior(&self) -> PriorSpec {
        self.prior
    }

    pub fn spec(&self) -> &MixtureSpec {
        &self.spec
    }

    pub fn data(&self) -> Option<&Dataset> {
        self.data.as_ref()
    }

    pub fn n(&self) -> usize {
        self.data.as_ref().map_or(0, Dataset::len)
    }

    fn dataset(&self) -> Result<&Dataset> {
        self.data.as_ref().ok_or(Error::EmptyDataset)
    }

    pub fn empirical_potential(&self, theta: &[f64]) -> Result<f64> {
        check_dim(self.dim(), theta.len())?;
        let data = self.dataset()?;
        Ok(empirical_value(data, self.beta, &self.prior, theta))
    }

    pub fn empirical_gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), theta.len())?;
        let data = self.dataset()?;
        let n = data.len() as f64;
        let mut acc = vec![0.0; theta.len()];
        for x in data.rows() {
            let w = dot(theta, x).tanh();
            acc.iter_mut().zip(x).for_each(|(a, xi)| *a += w * xi);
        }
        let prec = self.prior.precision();
        Ok(theta
            .iter()
            .zip(&acc)
            .map(|(t, a)| self.beta * (t - a / n) + prec * t)
            .collect())
    }

    fn line_moments(&self, theta: &[f64]) -> LineMoments {
        self.line.moments(dot(theta, self.spec.theta0()), norm(theta))
    }

    pub fn population_potential(&self, theta: &[f64]) -> Result<f64> {
        check_dim(self.dim(), theta.len())?;
        Ok(self.population_value(theta))
    }

    fn population_value(&self, theta: &[f64]) -> f64 {
        let m = self.line.expect_logcosh(dot(theta, self.spec.theta0()), norm(theta));
        self.beta * (0.5 * dot(theta, theta) - m) + self.prior.value(theta)
    }

    /// `∇U₀(θ) = β(θ − E[tanh t]·θ₀ − E[sech² t]·θ)` plus the prior term.
    pub fn population_gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), theta.len())?;
        let m = self.line_moments(theta);
        let prec = self.prior.precision();
        Ok(theta
            .iter()
            .zip(self.spec.theta0())
            .map(|(&t, &t0)| self.beta * (t - m.tanh * t0 - m.sech2 * t) + prec * t)
            .collect())
    }

    /// `∇²U₀(θ) = β(I − E[sech²(θᵀX) XXᵀ])` plus the prior term, assembled from
    /// line moments along `u = θ/‖θ‖`.
    pub fn population_hessian(&self, theta: &[f64]) -> Result<DMatrix<f64>> {
        let d = self.dim();
        check_dim(d, theta.len())?;
        if d > MAX_HESSIAN_DIM {
            return Err(Error::Unsupported(format!(
                "dense Hessian requested in dimension {d} (limit {MAX_HESSIAN_DIM})"
            )));
        }
        let m = self.line_moments(theta);
        let sigma = norm(theta);
        let u: Vec<f64> = if sigma > 0.0 {
            theta.iter().map(|t| t / sigma).collect()
        } else {
            let mut e = vec![0.0; d];
            e[0] = 1.0;
            e
        };
        let t0 = self.spec.theta0();
        let prec = self.prior.precision();
        Ok(DMatrix::from_fn(d, d, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            let moment = m.sech2 * (t0[i] * t0[j] + id - u[i] * u[j])
                + m.sech2_z * (t0[i] * u[j] + u[i] * t0[j])
                + m.sech2_z2 * u[i] * u[j];
            self.beta * (id - moment) + prec * id
        }))
    }

    /// Signed slack in the dissipativity inequality at `θ`; nonnegative values
    /// certify `⟨∇U(θ), θ⟩ ≥ (β/2)‖θ‖² − b` for the chosen `b`.
    pub fn dissipativity_margin(&self, theta: &[f64], bound: DissipativityBound) -> Result<f64> {
        let a2 = dot(self.spec.theta0(), self.spec.theta0());
        let r2 = dot(theta, theta);
        let (grad, b) = match bound {
            DissipativityBound::Population => {
                (self.population_gradient(theta)?, self.beta * (a2 + 1.0))
            }
            DissipativityBound::Empirical => {
                (self.empirical_gradient(theta)?, 2.0 * self.beta * (a2 + 1.0))
            }
            DissipativityBound::Contaminated { gamma, k, delta } => {
                if !(delta > 0.0 && delta < 1.0) {
                    return Err(Error::invalid("delta", "must lie in (0, 1)"));
                }
                let g = self.empirical_gradient(theta)?;
                let n = self.n() as f64;
                let slack = gamma * self.dim() as f64 * k * k * (n / delta).ln();
                (g, 2.0 * self.beta * (a2 + 1.0 + slack))
            }
        };
        Ok(dot(&grad, theta) - (0.5 * self.beta * r2 - b))
    }

    /// The population potential as a sampler target.
    pub fn population(&self) -> Population<'_> {
        Population(self)
    }
}

fn empirical_value(data: &Dataset, beta: f64, prior: &PriorSpec, theta: &[f64]) -> f64 {
    let s: f64 = data.rows().map(|x| logcosh(dot(theta, x))).sum();
    beta * (0.5 * dot(theta, theta) - s / data.len() as f64) + prior.value(theta)
}

/// Empirical potential `U`.
impl Potential for PowerPosterior {
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn value(&self, theta: &[f64]) -> f64 {
        let data = self
            .data
            .as_ref()
            .expect("empirical potential needs a dataset; use population() otherwise");
        empirical_value(data, self.beta, &self.prior, theta)
    }
}

/// Population potential `U₀` view of a [`PowerPosterior`].
#[derive(Debug, Clone, Copy)]
pub struct Population<'a>(&'a PowerPosterior);

impl Potential for Population<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn value(&self, theta: &[f64]) -> f64 {
        self.0.population_value(theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::sample_data;
    use approx::assert_relative_eq;

    fn posterior(d: usize, a: f64, beta: f64, n: usize) -> PowerPosterior {
        let spec = MixtureSpec::along_first_axis(d, a).unwrap();
        let data = sample_data(&spec, None, n, 1).unwrap();
        PowerPosterior::new(spec, data, beta, PriorSpec::UniformImproper).unwrap()
    }

    #[test]
    fn potentials_vanish_at_origin() {
        let pp = posterior(3, 2.0, 4.0, 30);
        assert_eq!(pp.empirical_potential(&[0.0; 3]).unwrap(), 0.0);
        assert_eq!(pp.population_potential(&[0.0; 3]).unwrap(), 0.0);
    }

    #[test]
    fn rejects_invalid_construction() {
        let spec = MixtureSpec::along_first_axis(2, 1.0).unwrap();
        let data = sample_data(&spec, None, 5, 1).unwrap();
        assert!(PowerPosterior::new(spec.clone(), data.clone(), 0.0, PriorSpec::UniformImproper).is_err());
        assert!(PowerPosterior::new(spec.clone(), data.clone(), -1.0, PriorSpec::UniformImproper).is_err());
        assert!(PowerPosterior::new(spec.clone(), data.clone(), 1.0, PriorSpec::Gaussian { sigma: 0.0 }).is_err());
        // β above n only warns.
        assert!(PowerPosterior::new(spec.clone(), data, 50.0, PriorSpec::UniformImproper).is_ok());
        let other = MixtureSpec::along_first_axis(3, 1.0).unwrap();
        let data3 = sample_data(&other, None, 5, 1).unwrap();
        assert!(matches!(
            PowerPosterior::new(spec, data3, 1.0, PriorSpec::UniformImproper),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn population_only_rejects_empirical_calls() {
        let spec = MixtureSpec::along_first_axis(2, 1.0).unwrap();
        let pp = PowerPosterior::population_only(spec, 1.0, PriorSpec::UniformImproper).unwrap();
        assert!(matches!(pp.empirical_potential(&[0.0, 0.0]), Err(Error::EmptyDataset)));
        assert!(pp.population_potential(&[0.5, 0.0]).is_ok());
    }

    #[test]
    fn gaussian_prior_adds_quadratic() {
        let spec = MixtureSpec::along_first_axis(2, 1.0).unwrap();
        let data = sample_data(&spec, None, 20, 4).unwrap();
        let flat = PowerPosterior::new(spec.clone(), data.clone(), 2.0, PriorSpec::UniformImproper).unwrap();
        let gp = PowerPosterior::new(spec, data, 2.0, PriorSpec::Gaussian { sigma: 2.0 }).unwrap();
        let th = [0.7, -1.1];
        let extra = dot(&th, &th) / 8.0;
        assert_relative_eq!(gp.empirical_potential(&th).unwrap(), flat.empirical_potential(&th).unwrap() + extra, max_relative = 1e-14);
        assert_relative_eq!(gp.population_potential(&th).unwrap(), flat.population_potential(&th).unwrap() + extra, max_relative = 1e-14);
        let g0 = flat.population_gradient(&th).unwrap();
        let g1 = gp.population_gradient(&th).unwrap();
        for i in 0..2 {
            assert_relative_eq!(g1[i], g0[i] + th[i] / 4.0, max_relative = 1e-13);
        }
    }

    // U₀(θ) for d = 1, θ = θ₀ = 2, β = 1: 2 − E log cosh(4 + 2Z), with the
    // expectation from a 40-digit adaptive quadrature.
    #[test]
    fn population_potential_regression_value() {
        let spec = MixtureSpec::new(vec![2.0]).unwrap();
        let pp = PowerPosterior::population_only(spec, 1.0, PriorSpec::UniformImproper)
            .unwrap()
            .with_quadrature_nodes(crate::quadrature::ORACLE_NODES)
            .unwrap();
        assert_relative_eq!(pp.population_potential(&[2.0]).unwrap(), -1.367_279_806_263_133, max_relative = 1e-12);
    }

    #[test]
    fn hessian_dimension_limit() {
        let spec = MixtureSpec::along_first_axis(21, 1.0).unwrap();
        let pp = PowerPosterior::population_only(spec, 1.0, PriorSpec::UniformImproper).unwrap();
        assert!(matches!(pp.population_hessian(&[0.1; 21]), Err(Error::Unsupported(_))));
    }

    #[test]
    fn dissipativity_at_origin() {
        let pp = posterior(2, 2.0, 3.0, 40);
        let m = pp.dissipativity_margin(&[0.0, 0.0], DissipativityBound::Population).unwrap();
        assert_relative_eq!(m, 3.0 * 5.0, max_relative = 1e-14);
        let m = pp.dissipativity_margin(&[0.0, 0.0], DissipativityBound::Empirical).unwrap();
        assert_relative_eq!(m, 2.0 * 3.0 * 5.0, max_relative = 1e-14);
    }
}
