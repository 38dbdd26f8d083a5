//! End-to-end experiment drivers.
//!
//! Each driver takes a typed config (defaults, then an optional TOML file,
//! then command-line overrides; later sources win), writes its artifacts into
//! an output directory and returns an [`Outcome`] listing machine-readable
//! assertions. The manifest hash is a SHA-256 of the experiment id, crate
//! version, seed and resolved config, so identical manifests produce
//! byte-identical CSV/JSON/SVG files. Wall-clock time only goes to `run.log`.

mod ablation;
mod contamination;
mod figure1;
mod generate;
mod sample;
mod scaling;
mod validate;

pub use ablation::{run_ablation, AblationConfig};
pub use contamination::{run_contamination, threshold_shape, ContaminationConfig};
pub use figure1::{run_figure1, run_panel, Figure1Config, Panel, PanelSettings};
pub use generate::{run_generate_data, GenerateConfig};
pub use sample::{run_sample, SampleConfig};
pub use scaling::{run_scaling, ScalingConfig};
pub use validate::{run_validate_theory, Suite, ValidateConfig};

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::{self, CsvTable};
use crate::mixture::Dataset;
use crate::sampler::ChainTrace;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Command-line overrides shared by every experiment. Fields an experiment
/// has no use for are ignored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub eta: Option<f64>,
    pub steps: Option<usize>,
    pub beta: Option<f64>,
    pub a: Option<f64>,
    pub d: Option<usize>,
    pub n: Option<usize>,
}

pub trait ExperimentConfig: Serialize + DeserializeOwned + Default + Clone {
    const ID: &'static str;
    fn apply(&mut self, o: &Overrides);
    fn validate(&self) -> Result<()>;
    fn seed(&self) -> u64;
}

/// Defaults, then the TOML file (if any), then the overrides.
pub fn load_config<C: ExperimentConfig>(file: Option<&Path>, overrides: &Overrides) -> Result<C> {
    let mut cfg: C = match file {
        Some(p) => toml::from_str(&io::read_text(p)?)
            .map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?,
        None => C::default(),
    };
    cfg.apply(overrides);
    cfg.validate()?;
    Ok(cfg)
}

/// Caps the global worker pool. Only the first call has an effect.
pub fn configure_jobs(jobs: Option<usize>) {
    if let Some(j) = jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
}

pub fn manifest_hash(experiment: &str, seed: u64, config: &Value) -> String {
    let canonical = serde_json::json!({
        "experiment": experiment,
        "tool_version": TOOL_VERSION,
        "seed": seed,
        "config": config,
    });
    hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    pub tool_version: String,
    pub seed: u64,
    pub config: Value,
    pub manifest_hash: String,
    /// File names relative to the output directory.
    pub artifacts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    /// Observations are reported but do not affect the exit status.
    pub gating: bool,
    pub detail: String,
}

impl Assertion {
    pub fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            gating: true,
            detail: detail.into(),
        }
    }

    pub fn observe(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            gating: false,
            ..Self::check(name, passed, detail)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub experiment: String,
    pub manifest_hash: String,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
    pub summary: Value,
    #[serde(skip)]
    pub out_dir: PathBuf,
}

impl Outcome {
    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| a.gating && !a.passed)
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    pub fn artifact(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

/// Output directory plus the artifacts written so far.
pub struct Run {
    dir: PathBuf,
    experiment: String,
    seed: u64,
    config: Value,
    hash: String,
    artifacts: Vec<String>,
    started: Instant,
}

impl Run {
    pub fn start<C: ExperimentConfig>(dir: &Path, cfg: &C) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let config = serde_json::to_value(cfg)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            experiment: C::ID.to_string(),
            seed: cfg.seed(),
            hash: manifest_hash(C::ID, cfg.seed(), &config),
            config,
            artifacts: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.artifacts.push(name.to_string());
        self.dir.join(name)
    }

    pub fn csv(&mut self, name: &str, table: &CsvTable) -> Result<()> {
        let p = self.path(name);
        io::write_csv(&p, &self.hash, table)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, body: &T) -> Result<()> {
        let p = self.path(name);
        io::write_json(&p, &self.hash, body)
    }

    pub fn svg(&mut self, name: &str, contents: &str) -> Result<()> {
        let p = self.path(name);
        io::write_text(&p, contents)
    }

    pub fn trace(&mut self, name: &str, trace: &ChainTrace) -> Result<()> {
        let p = self.path(name);
        io::write_trace(&p, &self.hash, trace)
    }

    pub fn dataset(&mut self, name: &str, data: &Dataset) -> Result<()> {
        let p = self.path(name);
        io::write_dataset(&p, &self.hash, data)
    }

    /// Writes `assertions.json`, `manifest.json` and `run.log`.
    pub fn finish(mut self, assertions: Vec<Assertion>, summary: Value) -> Result<Outcome> {
        let passed = assertions.iter().all(|a| a.passed || !a.gating);
        let outcome = Outcome {
            experiment: self.experiment.clone(),
            manifest_hash: self.hash.clone(),
            passed,
            assertions,
            summary,
            out_dir: self.dir.clone(),
        };
        self.json("assertions.json", &outcome)?;
        let manifest = Manifest {
            experiment: self.experiment.clone(),
            tool_version: TOOL_VERSION.to_string(),
            seed: self.seed,
            config: self.config.clone(),
            manifest_hash: self.hash.clone(),
            artifacts: self.artifacts.clone(),
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        io::write_text(&self.dir.join("manifest.json"), &text)?;
        let log = format!(
            "experiment={} manifest={} passed={} wall_clock_s={:.3}\n",
            self.experiment,
            self.hash,
            passed,
            self.started.elapsed().as_secs_f64()
        );
        io::write_text(&self.dir.join("run.log"), &log)?;
        log::info!("{}", log.trim_end());
        Ok(outcome)
    }
}

pub(crate) fn require(cond: bool, name: &'static str, reason: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::invalid(name, reason))
    }
}

/// `e_k` in `d` dimensions.
pub(crate) fn unit(d: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[k] = 1.0;
    e
}

/// `a = 5` → `5`, `a = 0.5` → `0.5`; used in artifact names.
pub(crate) fn label(x: f64) -> String {
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_depends_on_every_manifest_field() {
        let c = serde_json::json!({"d": 1});
        let h = manifest_hash("x", 1, &c);
        assert_eq!(h.len(), 64);
        assert_eq!(h, manifest_hash("x", 1, &c));
        assert_ne!(h, manifest_hash("y", 1, &c));
        assert_ne!(h, manifest_hash("x", 2, &c));
        assert_ne!(h, manifest_hash("x", 1, &serde_json::json!({"d": 2})));
    }

    #[test]
    fn toml_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, "steps = 500\nbeta = 3.0\n").unwrap();
        let o = Overrides {
            beta: Some(4.0),
            ..Default::default()
        };
        let cfg: SampleConfig = load_config(Some(&p), &o).unwrap();
        assert_eq!(cfg.steps, 500);
        assert_eq!(cfg.beta, 4.0);
        std::fs::write(&p, "no_such_key = 1\n").unwrap();
        assert!(matches!(
            load_config::<SampleConfig>(Some(&p), &Overrides::default()),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn labels() {
        assert_eq!(label(5.0), "5");
        assert_eq!(label(0.5), "0.5");
    }
}
