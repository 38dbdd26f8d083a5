//! Across-chain mixing times over `d ∈ {1, 2}` and a range of separations.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{label, require, Assertion, ExperimentConfig, Outcome, Overrides, Run};
use crate::diagnostics::{
    build_reference, mixing_time_estimate, tail_radius, tv_to_reference, Level, MixingCurve, ReferenceDensity,
};
use crate::error::Result;
use crate::grid::Grid;
use crate::io::{fmt_f64, line_chart, CsvTable, Series};
use crate::mixture::{sample_data, MixtureSpec};
use crate::potential::{PowerPosterior, PriorSpec};
use crate::sampler::{practical_step_size, run_chain, SamplerConfig};
use crate::theory::least_squares_slope;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingConfig {
    pub d_list: Vec<usize>,
    pub a_list: Vec<f64>,
    pub beta: f64,
    pub n: usize,
    pub eta: Option<f64>,
    pub seed: u64,
    pub chains: usize,
    pub max_steps: usize,
    pub eps: f64,
    /// Reference cell width after coarsening.
    pub cell_width: f64,
    /// The reference is integrated on a grid this many times finer per axis.
    pub refine: usize,
    /// Length of the single long chain compared with the reference.
    pub steps: usize,
    pub single_chain_tv_max: f64,
    pub slope_max: f64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            d_list: vec![1, 2],
            a_list: vec![0.0, 1.0, 2.0, 3.0],
            beta: 50.0,
            n: 50,
            eta: None,
            seed: 1,
            chains: 2000,
            max_steps: 3000,
            eps: 0.1,
            cell_width: 0.4,
            refine: 8,
            steps: 100_000,
            single_chain_tv_max: 0.05,
            slope_max: 6.0,
        }
    }
}

impl ExperimentConfig for ScalingConfig {
    const ID: &'static str = "scaling";

    fn apply(&mut self, o: &Overrides) {
        self.seed = o.seed.unwrap_or(self.seed);
        self.eta = o.eta.or(self.eta);
        self.steps = o.steps.unwrap_or(self.steps);
        self.beta = o.beta.unwrap_or(self.beta);
        self.n = o.n.unwrap_or(self.n);
        if let Some(d) = o.d {
            self.d_list = vec![d];
        }
        if let Some(a) = o.a {
            self.a_list = vec![a];
        }
    }

    fn validate(&self) -> Result<()> {
        require(!self.d_list.is_empty() && self.d_list.iter().all(|d| (1..=2).contains(d)), "d_list", "grid references need d ∈ {1, 2}")?;
        require(!self.a_list.is_empty() && self.a_list.iter().all(|a| *a >= 0.0), "a_list", "need values ≥ 0")?;
        require(self.beta > 0.0 && self.n >= 1, "beta", "need β > 0 and n ≥ 1")?;
        require(self.eta.is_none_or(|e| e > 0.0 && e.is_finite()), "eta", "must be positive")?;
        require(self.max_steps >= 1 && self.steps > 1000, "steps", "need max_steps ≥ 1 and steps > 1000")?;
        require(self.eps > 0.0 && self.eps < 1.0, "eps", "must be in (0, 1)")?;
        require(self.cell_width > 0.0 && self.refine >= 1, "cell_width", "need a positive width and refine ≥ 1")
    }

    fn seed(&self) -> u64 {
        self.seed
    }
}

/// Reference on a cube covering `R_{0.001}` plus a margin, integrated at
/// `refine`× resolution and summed back to `cell_width` cells.
pub(crate) fn coarse_reference(pp: &PowerPosterior, cell_width: f64, refine: usize) -> Result<ReferenceDensity> {
    let d = pp.dim();
    let r = tail_radius(d, pp.spec().theta0_norm(), pp.beta(), 1e-3)? + 0.3;
    let points = refine * (2.0 * r / cell_width).ceil() as usize;
    build_reference(pp, Grid::cube(d, r, points)?, Level::Empirical)?.coarsen(refine)
}

struct Entry {
    d: usize,
    a: f64,
    eta: f64,
    curve: MixingCurve,
    single_tv: f64,
    acceptance: f64,
}

pub fn run_scaling(cfg: &ScalingConfig, out: &std::path::Path) -> Result<Outcome> {
    let mut run = Run::start(out, cfg)?;
    let mut entries = Vec::new();
    for &d in &cfg.d_list {
        for &a in &cfg.a_list {
            let spec = MixtureSpec::along_first_axis(d, a)?;
            let data = sample_data(&spec, None, cfg.n, cfg.seed)?;
            let pp = PowerPosterior::new(spec, data, cfg.beta, PriorSpec::UniformImproper)?;
            let eta = match cfg.eta {
                Some(e) => e,
                None => practical_step_size(d, cfg.beta)?,
            };
            let reference = coarse_reference(&pp, cfg.cell_width, cfg.refine)?;
            let chain = SamplerConfig::rmrw(eta, cfg.steps, cfg.seed);
            let tr = run_chain(&pp, &chain)?;
            let single_tv = tv_to_reference(&[&tr], &reference, 1000)?;
            let curve = mixing_time_estimate(&pp, &chain, &reference, cfg.max_steps, cfg.chains)?;
            log::info!("scaling d={d} a={a}: T={:?} single-chain TV={single_tv}", curve.estimate(cfg.eps));
            entries.push(Entry {
                d,
                a,
                eta,
                curve,
                single_tv,
                acceptance: tr.acceptance_rate,
            });
        }
    }

    let mut table = CsvTable::new(&[
        "d",
        "a",
        "d_plus_a2",
        "eta",
        "mixing_time",
        "iid_floor",
        "final_tv",
        "single_chain_tv",
        "acceptance_rate",
    ]);
    let mut curves = CsvTable::new(&["d", "a", "step", "tv"]);
    let mut series = Vec::new();
    for e in &entries {
        let t = e.curve.estimate(cfg.eps);
        table.push(vec![
            e.d.to_string(),
            fmt_f64(e.a),
            fmt_f64(e.d as f64 + e.a * e.a),
            fmt_f64(e.eta),
            t.map(|t| t.to_string()).unwrap_or_default(),
            fmt_f64(e.curve.iid_floor),
            fmt_f64(*e.curve.tv.last().unwrap()),
            fmt_f64(e.single_tv),
            fmt_f64(e.acceptance),
        ]);
        for (s, tv) in e.curve.checkpoints.iter().zip(&e.curve.tv) {
            curves.push(vec![e.d.to_string(), fmt_f64(e.a), s.to_string(), fmt_f64(*tv)]);
        }
        series.push(Series {
            name: format!("d={} a={}", e.d, label(e.a)),
            points: e
                .curve
                .checkpoints
                .iter()
                .zip(&e.curve.tv)
                .filter(|(s, _)| **s > 0)
                .map(|(s, tv)| ((*s as f64).log10(), *tv))
                .collect(),
        });
    }
    run.csv("table.csv", &table)?;
    run.csv("curves.csv", &curves)?;
    run.svg(
        "curves.svg",
        &line_chart(run.hash(), "Across-chain TV to the reference", "log10 step", "TV", &series),
    )?;

    let mut assertions = Vec::new();
    let finite: Vec<&Entry> = entries.iter().filter(|e| e.curve.estimate(cfg.eps).is_some()).collect();
    assertions.push(Assertion::check(
        "all_estimates_finite",
        finite.len() == entries.len(),
        format!("{} of {} configurations reach ε = {}", finite.len(), entries.len(), cfg.eps),
    ));
    let xs: Vec<f64> = finite.iter().map(|e| (e.d as f64 + e.a * e.a).ln()).collect();
    let ys: Vec<f64> = finite
        .iter()
        .map(|e| (e.curve.estimate(cfg.eps).unwrap().max(1) as f64).ln())
        .collect();
    let spread = xs.iter().any(|x| (x - xs[0]).abs() > 1e-12);
    let slope = if xs.len() >= 2 && spread {
        least_squares_slope(&xs, &ys)
    } else {
        f64::NAN
    };
    assertions.push(Assertion::check(
        "slope_below_max",
        slope.is_finite() && slope < cfg.slope_max,
        format!("log-log slope {slope}"),
    ));
    assertions.push(Assertion::observe(
        "slope_positive",
        slope > 0.0,
        format!("log-log slope {slope}"),
    ));
    for e in entries.iter().filter(|e| e.d == 1) {
        assertions.push(Assertion::check(
            format!("d1_a{}/single_chain_tv", label(e.a)),
            e.single_tv < cfg.single_chain_tv_max,
            format!("TV {} after {} steps", e.single_tv, cfg.steps),
        ));
    }
    for &d in &cfg.d_list {
        let row: Vec<&Entry> = entries.iter().filter(|e| e.d == d).collect();
        let at_zero = row.iter().find(|e| e.a == 0.0).and_then(|e| e.curve.estimate(cfg.eps));
        if let Some(t0) = at_zero {
            let min = row.iter().filter_map(|e| e.curve.estimate(cfg.eps)).min().unwrap();
            assertions.push(Assertion::observe(
                format!("d{d}/a0_is_row_minimum"),
                t0 <= min,
                format!("T at a = 0 is {t0}, row minimum {min}"),
            ));
        }
    }
    let summary = json!({ "slope": slope, "eps": cfg.eps });
    run.finish(assertions, summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_is_coarsened_to_the_cell_width() {
        let spec = MixtureSpec::along_first_axis(1, 1.0).unwrap();
        let data = sample_data(&spec, None, 20, 3).unwrap();
        let pp = PowerPosterior::new(spec, data, 10.0, PriorSpec::UniformImproper).unwrap();
        let r = coarse_reference(&pp, 0.4, 4).unwrap();
        let w = r.grid().axis(0).width();
        assert!(w <= 0.4 && w > 0.35, "{w}");
        assert!((r.masses().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn only_one_and_two_dimensions() {
        let c = ScalingConfig {
            d_list: vec![3],
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }
}
