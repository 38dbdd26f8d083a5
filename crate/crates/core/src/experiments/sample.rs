//! Raw chain runs: one trace CSV plus a JSON summary.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{require, unit, Assertion, ExperimentConfig, Outcome, Overrides, Run};
use crate::diagnostics::{tail_radius, DiagnosticsReport};
use crate::error::Result;
use crate::io::read_dataset;
use crate::mixture::{sample_data, MixtureSpec};
use crate::potential::{PowerPosterior, PriorSpec};
use crate::sampler::{practical_step_size, run_chain, Algorithm, Init, SamplerConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    pub d: usize,
    pub n: usize,
    pub beta: f64,
    pub a: f64,
    pub steps: usize,
    pub eta: Option<f64>,
    pub seed: u64,
    pub algorithm: Algorithm,
    /// Fixed start; a standard Gaussian draw when absent.
    pub init: Option<Vec<f64>>,
    /// Dataset CSV to sample from instead of generating `n` points.
    pub data: Option<PathBuf>,
    pub prior: PriorSpec,
    pub burn_in: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            d: 2,
            n: 100,
            beta: 8.0,
            a: 2.0,
            steps: 10_000,
            eta: None,
            seed: 1,
            algorithm: Algorithm::Rmrw,
            init: None,
            data: None,
            prior: PriorSpec::UniformImproper,
            burn_in: 0,
        }
    }
}

impl ExperimentConfig for SampleConfig {
    const ID: &'static str = "sample";

    fn apply(&mut self, o: &Overrides) {
        self.seed = o.seed.unwrap_or(self.seed);
        self.eta = o.eta.or(self.eta);
        self.steps = o.steps.unwrap_or(self.steps);
        self.beta = o.beta.unwrap_or(self.beta);
        self.a = o.a.unwrap_or(self.a);
        self.d = o.d.unwrap_or(self.d);
        self.n = o.n.unwrap_or(self.n);
    }

    fn validate(&self) -> Result<()> {
        require(self.d >= 1 && self.n >= 1, "d", "d and n must be at least 1")?;
        require(self.beta > 0.0 && self.beta.is_finite(), "beta", "must be positive")?;
        require(self.a >= 0.0 && self.a.is_finite(), "a", "must be finite and ≥ 0")?;
        require(self.steps > self.burn_in, "steps", "must exceed burn_in")?;
        require(self.eta.is_none_or(|e| e > 0.0 && e.is_finite()), "eta", "must be positive")?;
        require(self.init.as_ref().is_none_or(|x| x.len() == self.d), "init", "length must equal d")
    }

    fn seed(&self) -> u64 {
        self.seed
    }
}

pub fn run_sample(cfg: &SampleConfig, out: &std::path::Path) -> Result<Outcome> {
    let mut run = Run::start(out, cfg)?;
    let spec = MixtureSpec::along_first_axis(cfg.d, cfg.a)?;
    let data = match &cfg.data {
        Some(p) => read_dataset(p)?,
        None => sample_data(&spec, None, cfg.n, cfg.seed)?,
    };
    let pp = PowerPosterior::new(spec, data, cfg.beta, cfg.prior)?;
    let eta = match cfg.eta {
        Some(e) => e,
        None => practical_step_size(cfg.d, cfg.beta)?,
    };
    let mut chain = SamplerConfig::rmrw(eta, cfg.steps, cfg.seed).with_algorithm(cfg.algorithm);
    if let Some(x) = &cfg.init {
        chain = chain.with_init(Init::Fixed(x.clone()));
    }
    let trace = run_chain(&pp, &chain)?;
    run.trace("trace.csv", &trace)?;
    let radius = 3.0 * tail_radius(cfg.d, cfg.a, cfg.beta, 0.01)?;
    let report = DiagnosticsReport::for_trace(&trace, &unit(cfg.d, 0), cfg.burn_in, radius)?;
    let summary = json!({
        "sampler": chain,
        "n": pp.n(),
        "acceptance_rate": trace.acceptance_rate,
        "reflection_rate": trace.reflection_rate(),
        "diagnostics": report,
    });
    run.json("summary.json", &summary)?;
    let finite = trace.states().all(|s| s.iter().all(|v| v.is_finite()));
    run.finish(vec![Assertion::check("states_finite", finite, "")], summary)
}
