//! RMRW against plain MRW from a single-mode start, same posterior and `η`.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::figure1::BALANCE_BAND;
use super::{label, require, unit, Assertion, ExperimentConfig, Outcome, Overrides, Run};
use crate::error::Result;
use crate::io::{fmt_f64, line_chart, CsvTable, Series};
use crate::mixture::{sample_data, MixtureSpec};
use crate::potential::{PowerPosterior, PriorSpec};
use crate::sampler::{practical_step_size, run_chain, Algorithm, ChainTrace, Init, SamplerConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AblationConfig {
    pub d: usize,
    pub n: usize,
    pub beta: f64,
    pub a_values: Vec<f64>,
    pub steps: usize,
    pub eta: Option<f64>,
    pub seed: u64,
    pub checkpoint_every: usize,
    /// MRW counts as trapped when `min(b, 1 − b)` is below this.
    pub trapped_below: f64,
    /// At `a = 0` the two balances must agree to within this.
    pub agreement_tol: f64,
}

impl Default for AblationConfig {
    fn default() -> Self {
        Self {
            d: 10,
            n: 100,
            beta: 8.0,
            a_values: vec![0.0, 5.0],
            steps: 100_000,
            eta: None,
            seed: 1,
            checkpoint_every: 1000,
            trapped_below: 0.02,
            agreement_tol: 0.05,
        }
    }
}

impl ExperimentConfig for AblationConfig {
    const ID: &'static str = "ablation";

    fn apply(&mut self, o: &Overrides) {
        self.seed = o.seed.unwrap_or(self.seed);
        self.eta = o.eta.or(self.eta);
        self.steps = o.steps.unwrap_or(self.steps);
        self.beta = o.beta.unwrap_or(self.beta);
        self.d = o.d.unwrap_or(self.d);
        self.n = o.n.unwrap_or(self.n);
        if let Some(a) = o.a {
            self.a_values = if a == 0.0 { vec![0.0] } else { vec![0.0, a] };
        }
    }

    fn validate(&self) -> Result<()> {
        require(self.d >= 1 && self.n >= 1, "d", "d and n must be at least 1")?;
        require(self.beta > 0.0, "beta", "must be positive")?;
        require(self.steps >= 1, "steps", "must be at least 1")?;
        require(self.eta.is_none_or(|e| e > 0.0 && e.is_finite()), "eta", "must be positive")?;
        require(self.checkpoint_every >= 1, "checkpoint_every", "must be at least 1")?;
        require(!self.a_values.is_empty() && self.a_values.iter().all(|a| *a >= 0.0), "a_values", "need values ≥ 0")
    }

    fn seed(&self) -> u64 {
        self.seed
    }
}

/// Running fraction of states `1..=t` with `θ₁ > 0`, sampled every `every` steps.
fn running_balance(trace: &ChainTrace, every: usize) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    let mut positive = 0usize;
    for t in 1..=trace.steps() {
        positive += (trace.state(t)[0] > 0.0) as usize;
        if t % every == 0 || t == trace.steps() {
            out.push((t, positive as f64 / t as f64));
        }
    }
    out
}

pub fn run_ablation(cfg: &AblationConfig, out: &std::path::Path) -> Result<Outcome> {
    let mut run = Run::start(out, cfg)?;
    let eta = match cfg.eta {
        Some(e) => e,
        None => practical_step_size(cfg.d, cfg.beta)?,
    };
    let mut table = CsvTable::new(&["a", "step", "rmrw_balance", "mrw_balance"]);
    let mut assertions = Vec::new();
    let mut summary = Vec::new();
    for &a in &cfg.a_values {
        let spec = MixtureSpec::along_first_axis(cfg.d, a)?;
        let data = sample_data(&spec, None, cfg.n, cfg.seed)?;
        let pp = PowerPosterior::new(spec, data, cfg.beta, PriorSpec::UniformImproper)?;
        let start: Vec<f64> = unit(cfg.d, 0).into_iter().map(|v| v * a.max(1.0)).collect();
        let base = SamplerConfig::rmrw(eta, cfg.steps, cfg.seed).with_init(Init::Fixed(start));
        let r = run_chain(&pp, &base)?;
        let m = run_chain(&pp, &base.clone().with_algorithm(Algorithm::Mrw))?;
        let rb = running_balance(&r, cfg.checkpoint_every);
        let mb = running_balance(&m, cfg.checkpoint_every);
        for ((t, x), (_, y)) in rb.iter().zip(&mb) {
            table.push(vec![fmt_f64(a), t.to_string(), fmt_f64(*x), fmt_f64(*y)]);
        }
        let series = |name: &str, v: &[(usize, f64)]| Series {
            name: name.into(),
            points: v.iter().map(|&(t, b)| (t as f64, b)).collect(),
        };
        let svg = line_chart(
            run.hash(),
            &format!("Running mode balance, a = {}", label(a)),
            "step",
            "fraction with θ₁ > 0",
            &[series("RMRW", &rb), series("MRW", &mb)],
        );
        run.svg(&format!("balance_a{}.svg", label(a)), &svg)?;

        let (br, bm) = (rb.last().unwrap().1, mb.last().unwrap().1);
        let stem = format!("a{}", label(a));
        if a > 0.0 {
            assertions.push(Assertion::check(
                format!("{stem}/rmrw_balanced"),
                (BALANCE_BAND.0..=BALANCE_BAND.1).contains(&br),
                format!("RMRW balance {br}"),
            ));
            assertions.push(Assertion::check(
                format!("{stem}/mrw_trapped"),
                bm.min(1.0 - bm) < cfg.trapped_below,
                format!("MRW balance {bm}"),
            ));
        } else {
            assertions.push(Assertion::check(
                format!("{stem}/balances_agree"),
                (br - bm).abs() <= cfg.agreement_tol,
                format!("RMRW {br}, MRW {bm}"),
            ));
        }
        summary.push(json!({
            "a": a,
            "rmrw_balance": br,
            "mrw_balance": bm,
            "rmrw_acceptance": r.acceptance_rate,
            "mrw_acceptance": m.acceptance_rate,
        }));
    }
    run.csv("balance.csv", &table)?;
    run.finish(assertions, json!({ "eta": eta, "runs": summary }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn running_balance_counts_after_start() {
        let tr = ChainTrace::from_states(1, vec![-1.0, 1.0, 1.0, -1.0, 1.0]).unwrap();
        let b = running_balance(&tr, 2);
        assert_eq!(b, vec![(2, 1.0), (4, 0.75)]);
        let b = running_balance(&tr, 3);
        assert_eq!(b, vec![(3, 2.0 / 3.0), (4, 0.75)]);
    }
}
