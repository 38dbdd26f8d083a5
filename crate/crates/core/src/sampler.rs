//! Reflected Metropolis random walk (RMRW) and its non-reflected baseline.
//!
//! One RMRW step from `θ`:
//!
//! 1. `Y = θ + √η·ξ` with `ξ ~ N(0, I)`;
//! 2. `Z = Y` or `Z = −Y` with probability ½ each;
//! 3. move to `Z` with probability `min(1, exp(U(θ) − U(Z)))`.
//!
//! The proposal density is `q(z | θ) = ½φ(z; θ, ηI) + ½φ(z; −θ, ηI)`. Since
//! `‖z − θ‖ = ‖θ − z‖` and `‖z + θ‖ = ‖θ + z‖`, `q(z | θ) = q(θ | z)` and the
//! plain density ratio is the Metropolis–Hastings ratio.

use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::potential::Potential;
use crate::rng::{self, Rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Rmrw,
    Mrw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "at", rename_all = "snake_case")]
pub enum Init {
    StandardGaussian,
    Fixed(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub eta: f64,
    pub steps: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub init: Init,
}

impl SamplerConfig {
    pub fn rmrw(eta: f64, steps: usize, seed: u64) -> Self {
        Self {
            eta,
            steps,
            seed,
            algorithm: Algorithm::Rmrw,
            init: Init::StandardGaussian,
        }
    }

    pub fn with_algorithm(mut self, algorithm: Algorithm) -> Self {
        self.algorithm = algorithm;
        self
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::invalid("eta", "step size must be positive and finite"));
        }
        if self.steps == 0 {
            return Err(Error::invalid("steps", "must be at least 1"));
        }
        if let Init::Fixed(x) = &self.init {
            check_dim(d, x.len())?;
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("init", "initial state must be finite"));
            }
        }
        Ok(())
    }
}

/// `1/(400(2A + √d)²)` with `A = M = C(1 + ‖θ₀‖ + √(d + log(1/s))/β)` and `C = 1`.
pub fn default_step_size(d: usize, theta0_norm: f64, beta: f64, s: f64) -> Result<f64> {
    step_size_with_constant(d, theta0_norm, beta, s, 1.0)
}

pub fn step_size_with_constant(d: usize, theta0_norm: f64, beta: f64, s: f64, c: f64) -> Result<f64> {
    let radius = crate::diagnostics::tail_radius_with_constant(d, theta0_norm, beta, s, c)?;
    let span = 2.0 * radius + (d as f64).sqrt();
    Ok(1.0 / (400.0 * span * span))
}

/// `2.38²/(dβ)`: the random-walk scaling for a target whose curvature is of
/// order `β`. Used as the experiment default; the theory step size is orders
/// of magnitude smaller and does not cross between modes within 10⁵ steps.
pub fn practical_step_size(d: usize, beta: f64) -> Result<f64> {
    if d == 0 || !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::invalid("practical_step_size", "need d ≥ 1 and finite β > 0"));
    }
    Ok(2.38 * 2.38 / (d as f64 * beta))
}

/// `q(y | x)` for the reflected proposal (or the plain Gaussian one).
pub fn proposal_density(x: &[f64], y: &[f64], eta: f64, algorithm: Algorithm) -> f64 {
    let d = x.len() as f64;
    let norm = (2.0 * std::f64::consts::PI * eta).powf(-0.5 * d);
    let minus: f64 = x.iter().zip(y).map(|(a, b)| (b - a) * (b - a)).sum();
    let plain = norm * (-0.5 * minus / eta).exp();
    match algorithm {
        Algorithm::Mrw => plain,
        Algorithm::Rmrw => {
            let plus: f64 = x.iter().zip(y).map(|(a, b)| (b + a) * (b + a)).sum();
            0.5 * plain + 0.5 * norm * (-0.5 * plus / eta).exp()
        }
    }
}

/// Outcome of a single transition.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub next: Vec<f64>,
    pub accepted: bool,
    pub reflected: bool,
    /// Potential at `next`.
    pub potential: f64,
}

pub fn rmrw_step<P: Potential + ?Sized>(target: &P, theta: &[f64], eta: f64, rng: &mut Rng) -> Result<Step> {
    checked_step(target, theta, eta, Algorithm::Rmrw, rng)
}

pub fn mrw_step<P: Potential + ?Sized>(target: &P, theta: &[f64], eta: f64, rng: &mut Rng) -> Result<Step> {
    checked_step(target, theta, eta, Algorithm::Mrw, rng)
}

fn checked_step<P: Potential + ?Sized>(
    target: &P,
    theta: &[f64],
    eta: f64,
    algorithm: Algorithm,
    rng: &mut Rng,
) -> Result<Step> {
    check_dim(target.dim(), theta.len())?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::invalid("eta", "step size must be positive and finite"));
    }
    let u = target.value(theta);
    if !u.is_finite() {
        return Err(Error::Numerical(format!("non-finite potential {u} at the current state")));
    }
    let mut next = theta.to_vec();
    let (accepted, reflected, potential) = transition(target, theta, u, eta, algorithm, rng, &mut next);
    Ok(Step {
        next,
        accepted,
        reflected,
        potential,
    })
}

/// Writes the next state into `out` and returns `(accepted, reflected, U(next))`.
#[inline]
fn transition<P: Potential + ?Sized>(
    target: &P,
    theta: &[f64],
    u_theta: f64,
    eta: f64,
    algorithm: Algorithm,
    rng: &mut Rng,
    out: &mut [f64],
) -> (bool, bool, f64) {
    let scale = eta.sqrt();
    for (o, t) in out.iter_mut().zip(theta) {
        let z: f64 = rng.sample(StandardNormal);
        *o = t + scale * z;
    }
    let reflected = algorithm == Algorithm::Rmrw && rng.random::<bool>();
    if reflected {
        out.iter_mut().for_each(|v| *v = -*v);
    }
    let u_prop = target.value(out);
    let log_ratio = u_theta - u_prop;
    let coin: f64 = rng.random();
    let accepted = log_ratio >= 0.0 || coin < log_ratio.exp();
    if accepted {
        (true, reflected, u_prop)
    } else {
        out.copy_from_slice(theta);
        (false, reflected, u_theta)
    }
}

/// Recorded chain: `steps + 1` states and per-step flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainTrace {
    dim: usize,
    states: Vec<f64>,
    pub accepted: Vec<bool>,
    pub proposal_reflected: Vec<bool>,
    pub acceptance_rate: f64,
}

impl ChainTrace {
    /// Builds a trace from raw parts (flat row-major states, one more row
    /// than flags).
    pub fn from_parts(dim: usize, states: Vec<f64>, accepted: Vec<bool>, proposal_reflected: Vec<bool>) -> Result<Self> {
        if dim == 0 || !states.len().is_multiple_of(dim) {
            return Err(Error::invalid("states", "length is not a multiple of the dimension"));
        }
        let rows = states.len() / dim;
        if rows != accepted.len() + 1 || accepted.len() != proposal_reflected.len() {
            return Err(Error::invalid("accepted", "flags must have one entry per step"));
        }
        let acceptance_rate = mean_flag(&accepted);
        Ok(Self {
            dim,
            states,
            accepted,
            proposal_reflected,
            acceptance_rate,
        })
    }

    /// Trace made of given states only (flags all true), for diagnostics on
    /// externally produced samples.
    pub fn from_states(dim: usize, states: Vec<f64>) -> Result<Self> {
        let steps = (states.len() / dim.max(1)).saturating_sub(1);
        Self::from_parts(dim, states, vec![true; steps], vec![false; steps])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn steps(&self) -> usize {
        self.accepted.len()
    }

    /// Number of recorded states, `steps + 1`.
    pub fn len(&self) -> usize {
        self.states.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, t: usize) -> &[f64] {
        &self.states[t * self.dim..(t + 1) * self.dim]
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.states.chunks_exact(self.dim)
    }

    pub fn last(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    pub fn coordinate(&self, j: usize) -> Vec<f64> {
        self.states().map(|s| s[j]).collect()
    }

    pub fn projection(&self, direction: &[f64]) -> Vec<f64> {
        self.states().map(|s| crate::mixture::dot(s, direction)).collect()
    }

    pub fn reflection_rate(&self) -> f64 {
        mean_flag(&self.proposal_reflected)
    }
}

fn mean_flag(flags: &[bool]) -> f64 {
    if flags.is_empty() {
        0.0
    } else {
        flags.iter().filter(|&&a| a).count() as f64 / flags.len() as f64
    }
}

/// A chain advanced one transition at a time, without recording history.
pub struct Chain<'a, P: Potential + ?Sized> {
    target: &'a P,
    eta: f64,
    algorithm: Algorithm,
    rng: Rng,
    current: Vec<f64>,
    scratch: Vec<f64>,
    potential: f64,
}

impl<'a, P: Potential + ?Sized> Chain<'a, P> {
    /// Draws the initial state from the chain stream of `config.seed`.
    pub fn new(target: &'a P, config: &SamplerConfig) -> Result<Self> {
        let d = target.dim();
        config.validate(d)?;
        let mut rng = rng::stream(config.seed, Stream::Chain);
        let current: Vec<f64> = match &config.init {
            Init::StandardGaussian => (0..d).map(|_| rng.sample(StandardNormal)).collect(),
            Init::Fixed(x) => x.clone(),
        };
        let potential = target.value(&current);
        if !potential.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite potential {potential} at the initial state"
            )));
        }
        Ok(Self {
            target,
            eta: config.eta,
            algorithm: config.algorithm,
            rng,
            scratch: vec![0.0; d],
            current,
            potential,
        })
    }

    pub fn state(&self) -> &[f64] {
        &self.current
    }

    /// Returns `(accepted, reflected)`.
    pub fn advance(&mut self) -> (bool, bool) {
        let (acc, refl, u) = transition(
            self.target,
            &self.current,
            self.potential,
            self.eta,
            self.algorithm,
            &mut self.rng,
            &mut self.scratch,
        );
        std::mem::swap(&mut self.current, &mut self.scratch);
        self.potential = u;
        (acc, refl)
    }
}

pub fn run_chain<P: Potential + ?Sized>(target: &P, config: &SamplerConfig) -> Result<ChainTrace> {
    let d = target.dim();
    let mut chain = Chain::new(target, config)?;
    let mut states = Vec::with_capacity((config.steps + 1) * d);
    states.extend_from_slice(chain.state());
    let mut accepted = Vec::with_capacity(config.steps);
    let mut reflected = Vec::with_capacity(config.steps);
    for _ in 0..config.steps {
        let (acc, refl) = chain.advance();
        states.extend_from_slice(chain.state());
        accepted.push(acc);
        reflected.push(refl);
    }
    ChainTrace::from_parts(d, states, accepted, reflected)
}

/// Independent chains with seeds `seed, seed + 1, …`, in chain order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiChain {
    pub traces: Vec<ChainTrace>,
    pub mean_acceptance: f64,
    pub min_acceptance: f64,
    pub max_acceptance: f64,
}

pub fn run_multichain<P: Potential + ?Sized>(target: &P, config: &SamplerConfig, chains: usize) -> Result<MultiChain> {
    if chains == 0 {
        return Err(Error::invalid("chains", "must be at least 1"));
    }
    let traces = (0..chains as u64)
        .into_par_iter()
        .map(|k| run_chain(target, &config.clone().with_seed(config.seed.wrapping_add(k))))
        .collect::<Result<Vec<_>>>()?;
    let rates: Vec<f64> = traces.iter().map(|t| t.acceptance_rate).collect();
    Ok(MultiChain {
        mean_acceptance: rates.iter().sum::<f64>() / rates.len() as f64,
        min_acceptance: rates.iter().copied().fold(f64::INFINITY, f64::min),
        max_acceptance: rates.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    struct Quadratic(usize);
    impl Potential for Quadratic {
        fn dim(&self) -> usize {
            self.0
        }
        fn value(&self, theta: &[f64]) -> f64 {
            0.5 * theta.iter().map(|t| t * t).sum::<f64>()
        }
    }

    struct Flat;
    impl Potential for Flat {
        fn dim(&self) -> usize {
            2
        }
        fn value(&self, _: &[f64]) -> f64 {
            0.0
        }
    }

    #[test]
    fn practical_step_size_values() {
        assert_relative_eq!(practical_step_size(10, 8.0).unwrap(), 0.0708050, max_relative = 1e-6);
        assert_relative_eq!(practical_step_size(1, 50.0).unwrap(), 0.113288, max_relative = 1e-6);
        assert!(practical_step_size(0, 1.0).is_err());
        assert!(practical_step_size(2, 0.0).is_err());
    }

    #[test]
    fn step_size_reference_value() {
        // A = M = 1 + √2, η = 1/(400(A + M + √d)²) = 1/(400(3 + 2√2)²)
        let eta = default_step_size(1, 0.0, 1.0, (-1.0f64).exp()).unwrap();
        assert_relative_eq!(eta, 7.359_312_880_714_854e-5, max_relative = 1e-12);
        assert!(default_step_size(1, 0.0, 1.0, 1.0).is_err());
        assert!(default_step_size(1, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn step_size_is_monotone() {
        let s = 0.01;
        assert!(default_step_size(100, 1.0, 2.0, s).unwrap() < default_step_size(10, 1.0, 2.0, s).unwrap());
        assert!(default_step_size(5, 4.0, 2.0, s).unwrap() <= default_step_size(5, 2.0, 2.0, s).unwrap());
    }

    #[test]
    fn flat_target_always_accepts() {
        let mut rng = rng::stream(1, Stream::Chain);
        for _ in 0..100 {
            let s = rmrw_step(&Flat, &[0.3, -0.2], 0.5, &mut rng).unwrap();
            assert!(s.accepted);
        }
    }

    #[test]
    fn downhill_moves_always_accept() {
        // Every move from 50 towards the origin lowers the quadratic potential.
        let mut rng = rng::stream(2, Stream::Chain);
        let mut downhill = 0;
        for _ in 0..200 {
            let s = mrw_step(&Quadratic(1), &[50.0], 1e-4, &mut rng).unwrap();
            assert!(!s.reflected);
            if s.next[0] < 50.0 {
                downhill += 1;
                assert!(s.accepted);
            }
        }
        assert!(downhill > 50);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut rng = rng::stream(1, Stream::Chain);
        assert!(rmrw_step(&Quadratic(2), &[0.0], 0.1, &mut rng).is_err());
        assert!(rmrw_step(&Quadratic(1), &[0.0], 0.0, &mut rng).is_err());
        let bad = SamplerConfig::rmrw(0.1, 0, 1);
        assert!(run_chain(&Quadratic(1), &bad).is_err());
        let bad = SamplerConfig::rmrw(0.1, 5, 1).with_init(Init::Fixed(vec![0.0, 0.0]));
        assert!(run_chain(&Quadratic(1), &bad).is_err());
    }

    #[test]
    fn trace_flags_are_consistent() {
        let cfg = SamplerConfig::rmrw(2.0, 2_000, 9);
        let tr = run_chain(&Quadratic(3), &cfg).unwrap();
        assert_eq!(tr.len(), 2_001);
        for t in 1..tr.len() {
            if !tr.accepted[t - 1] {
                assert_eq!(tr.state(t), tr.state(t - 1));
            }
            if tr.state(t) != tr.state(t - 1) {
                assert!(tr.accepted[t - 1]);
            }
        }
        let rate = tr.accepted.iter().filter(|&&a| a).count() as f64 / 2_000.0;
        assert_eq!(tr.acceptance_rate, rate);
        assert!(tr.reflection_rate() > 0.4 && tr.reflection_rate() < 0.6);
    }

    #[test]
    fn fixed_init_is_first_state() {
        let cfg = SamplerConfig::rmrw(0.1, 3, 1).with_init(Init::Fixed(vec![1.5]));
        let tr = run_chain(&Quadratic(1), &cfg).unwrap();
        assert_eq!(tr.state(0), &[1.5]);
    }

    #[test]
    fn proposal_density_reflected_is_symmetric() {
        let x = [0.3, -1.2];
        let y = [-0.1, 1.0];
        let a = proposal_density(&x, &y, 0.4, Algorithm::Rmrw);
        let b = proposal_density(&y, &x, 0.4, Algorithm::Rmrw);
        assert_relative_eq!(a, b, max_relative = 1e-14);
    }
}
