//! Histogram diagnostics under Huber contamination `(1−γ)P₀ + γF`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::figure1::{run_panel, write_panel, PanelSettings};
use super::{label, require, unit, Assertion, ExperimentConfig, Outcome, Overrides, Run};
use crate::error::Result;
use crate::io::{fmt_f64, line_chart, CsvTable, Series};
use crate::mixture::{ContaminationSpec, Noise};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContaminationConfig {
    pub d: usize,
    pub n: usize,
    pub beta: f64,
    pub a: f64,
    pub steps: usize,
    pub eta: Option<f64>,
    pub burn_in: usize,
    pub seed: u64,
    pub gammas: Vec<f64>,
    /// Noise is `N(0, K² I)`.
    pub k: f64,
    pub delta: f64,
    pub bin_width: f64,
    pub smoothing: usize,
    pub peak_floor: f64,
    /// Seeds `seed, seed + 1, …` run at half the `c = 1` threshold.
    pub replications: usize,
    pub replication_pass_rate: f64,
    /// Detector sanity: all data at `sanity_offset · e₂` (`e₁` when `d = 1`).
    pub sanity_offset: f64,
}

impl Default for ContaminationConfig {
    fn default() -> Self {
        Self {
            d: 10,
            n: 100,
            beta: 8.0,
            a: 5.0,
            steps: 100_000,
            eta: None,
            burn_in: 0,
            seed: 1,
            gammas: vec![0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5],
            k: 2.0,
            delta: 0.05,
            bin_width: 0.25,
            smoothing: 3,
            peak_floor: 0.01,
            replications: 20,
            replication_pass_rate: 0.9,
            sanity_offset: 20.0,
        }
    }
}

impl ExperimentConfig for ContaminationConfig {
    const ID: &'static str = "contamination";

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
        self.settings(self.seed).validate()?;
        require(self.a > 0.0, "a", "the sweep needs separated modes")?;
        require(!self.gammas.is_empty(), "gammas", "need at least one value")?;
        require(self.gammas.windows(2).all(|w| w[0] < w[1]), "gammas", "must be strictly increasing")?;
        require(self.gammas.iter().all(|g| (0.0..=1.0).contains(g)), "gammas", "must lie in [0, 1]")?;
        require(self.k > 0.0, "k", "must be positive")?;
        require(self.delta > 0.0 && self.delta < 1.0, "delta", "must be in (0, 1)")?;
        require((self.n as f64) > self.delta, "n", "log(n/δ) must be positive")?;
        require(self.replications >= 1, "replications", "must be at least 1")
    }

    fn seed(&self) -> u64 {
        self.seed
    }
}

impl ContaminationConfig {
    fn settings(&self, seed: u64) -> PanelSettings {
        PanelSettings {
            d: self.d,
            n: self.n,
            beta: self.beta,
            steps: self.steps,
            eta: self.eta,
            burn_in: self.burn_in,
            seed,
            bin_width: self.bin_width,
            smoothing: self.smoothing,
            peak_floor: self.peak_floor,
            tail_eps: 0.01,
            tail_factor: 3.0,
        }
    }

    fn noise(&self, gamma: f64) -> Result<ContaminationSpec> {
        ContaminationSpec::new(gamma, Noise::Gaussian { mean: vec![0.0; self.d] }, self.k)
    }
}

/// `c / (β(K² + 1)(d + ‖θ₀‖²) log(n/δ))`.
pub fn threshold_shape(c: f64, beta: f64, k: f64, d: usize, theta0_norm: f64, n: usize, delta: f64) -> f64 {
    c / (beta * (k * k + 1.0) * (d as f64 + theta0_norm * theta0_norm) * (n as f64 / delta).ln())
}

pub fn run_contamination(cfg: &ContaminationConfig, out: &std::path::Path) -> Result<Outcome> {
    let mut run = Run::start(out, cfg)?;
    let base = cfg.settings(cfg.seed);
    let mut assertions = Vec::new();

    let panels = cfg
        .gammas
        .par_iter()
        .map(|&g| run_panel(&base, cfg.a, Some(&cfg.noise(g)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut table = CsvTable::new(&[
        "gamma",
        "contaminated_points",
        "passed",
        "e1_peaks",
        "e2_peaks",
        "mode_balance",
        "acceptance_rate",
    ]);
    let mut largest_passing = None;
    let mut prefix_ok = true;
    for (g, p) in cfg.gammas.iter().zip(&panels) {
        let ok = p.passed();
        prefix_ok &= ok;
        if prefix_ok {
            largest_passing = Some(*g);
        }
        table.push(vec![
            fmt_f64(*g),
            p.contaminated_points.to_string(),
            ok.to_string(),
            p.e1_peaks.len().to_string(),
            p.e2_peaks.len().to_string(),
            fmt_f64(p.report.mode_balance),
            fmt_f64(p.report.acceptance_rate),
        ]);
        write_panel(&mut run, &format!("gamma{}", label(*g)), p, cfg.smoothing)?;
    }
    run.csv("sweep.csv", &table)?;
    let svg = line_chart(
        run.hash(),
        "Mode balance under contamination",
        "γ",
        "fraction with θ₁ > 0",
        &[Series {
            name: "RMRW".into(),
            points: cfg.gammas.iter().zip(&panels).map(|(g, p)| (*g, p.report.mode_balance)).collect(),
        }],
    );
    run.svg("sweep.svg", &svg)?;

    if let Some(i) = cfg.gammas.iter().position(|&g| g == 0.0) {
        let clean = run_panel(&base, cfg.a, None)?;
        assertions.push(Assertion::check(
            "gamma0_matches_clean",
            clean == panels[i],
            "γ = 0 panel against the uncontaminated run with the same seed",
        ));
    }

    let shape1 = threshold_shape(1.0, cfg.beta, cfg.k, cfg.d, cfg.a, cfg.n, cfg.delta);
    let calibrated_c = largest_passing.map(|g| g / shape1);

    let at = unit(cfg.d, if cfg.d > 1 { 1 } else { 0 })
        .into_iter()
        .map(|v| v * cfg.sanity_offset)
        .collect();
    let sanity = run_panel(&base, cfg.a, Some(&ContaminationSpec::new(1.0, Noise::PointMass { at }, cfg.k)?))?;
    assertions.push(Assertion::check(
        "detector_flags_full_corruption",
        !sanity.passed(),
        format!("γ = 1 point mass: {} e₁ peaks", sanity.e1_peaks.len()),
    ));

    let half = 0.5 * shape1;
    let reps = (0..cfg.replications as u64)
        .into_par_iter()
        .map(|r| {
            let s = cfg.settings(cfg.seed.wrapping_add(r));
            run_panel(&s, cfg.a, Some(&cfg.noise(half)?)).map(|p| (p.passed(), p.contaminated_points))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rep_table = CsvTable::new(&["seed", "gamma", "contaminated_points", "passed"]);
    for (r, (ok, k)) in reps.iter().enumerate() {
        rep_table.push(vec![
            cfg.seed.wrapping_add(r as u64).to_string(),
            fmt_f64(half),
            k.to_string(),
            ok.to_string(),
        ]);
    }
    run.csv("half_threshold.csv", &rep_table)?;
    let rate = reps.iter().filter(|r| r.0).count() as f64 / reps.len() as f64;
    assertions.push(Assertion::check(
        "half_threshold_replications",
        rate >= cfg.replication_pass_rate,
        format!("pass rate {rate} over {} seeds at γ = {half}", reps.len()),
    ));
    assertions.push(Assertion::observe(
        "some_gamma_passes",
        largest_passing.is_some(),
        format!("largest passing γ {largest_passing:?}"),
    ));

    let summary = json!({
        "eta": panels[0].eta,
        "largest_passing_gamma": largest_passing,
        "threshold_shape_c1": shape1,
        "calibrated_c": calibrated_c,
        "half_threshold_gamma": half,
        "half_threshold_pass_rate": rate,
    });
    run.json("summary.json", &summary)?;
    run.finish(assertions, summary)
}
