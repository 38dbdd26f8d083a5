//! Dataset generation: CSV plus a JSON sidecar describing how it was drawn.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{require, ExperimentConfig, Outcome, Overrides, Run};
use crate::error::Result;
use crate::mixture::{sample_data, ContaminationSpec, MixtureSpec, Noise};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateConfig {
    pub d: usize,
    pub n: usize,
    pub a: f64,
    pub seed: u64,
    pub gamma: f64,
    pub k: f64,
    /// Point-mass contamination at this location; `N(0, K² I)` when absent.
    pub point_mass: Option<Vec<f64>>,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        Self {
            d: 2,
            n: 100,
            a: 2.0,
            seed: 1,
            gamma: 0.0,
            k: 2.0,
            point_mass: None,
        }
    }
}

impl ExperimentConfig for GenerateConfig {
    const ID: &'static str = "generate-data";

    fn apply(&mut self, o: &Overrides) {
        self.seed = o.seed.unwrap_or(self.seed);
        self.a = o.a.unwrap_or(self.a);
        self.d = o.d.unwrap_or(self.d);
        self.n = o.n.unwrap_or(self.n);
    }

    fn validate(&self) -> Result<()> {
        require(self.d >= 1 && self.n >= 1, "d", "d and n must be at least 1")?;
        require(self.a >= 0.0 && self.a.is_finite(), "a", "must be finite and ≥ 0")?;
        require(self.point_mass.as_ref().is_none_or(|x| x.len() == self.d), "point_mass", "length must equal d")?;
        self.contamination().map(|_| ())
    }

    fn seed(&self) -> u64 {
        self.seed
    }
}

impl GenerateConfig {
    fn contamination(&self) -> Result<Option<ContaminationSpec>> {
        if self.gamma == 0.0 {
            return Ok(None);
        }
        let noise = match &self.point_mass {
            Some(at) => Noise::PointMass { at: at.clone() },
            None => Noise::Gaussian { mean: vec![0.0; self.d] },
        };
        ContaminationSpec::new(self.gamma, noise, self.k).map(Some)
    }
}

pub fn run_generate_data(cfg: &GenerateConfig, out: &std::path::Path) -> Result<Outcome> {
    let mut run = Run::start(out, cfg)?;
    let spec = MixtureSpec::along_first_axis(cfg.d, cfg.a)?;
    let contamination = cfg.contamination()?;
    let data = sample_data(&spec, contamination.as_ref(), cfg.n, cfg.seed)?;
    run.dataset("data.csv", &data)?;
    let sidecar = json!({
        "theta0": spec.theta0(),
        "n": data.len(),
        "seed": cfg.seed,
        "contamination": contamination,
    });
    run.json("data.json", &sidecar)?;
    run.finish(Vec::new(), sidecar)
}
