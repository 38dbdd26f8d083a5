//! Projected histograms of a long RMRW run with and without mode separation.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{label, require, unit, Assertion, ExperimentConfig, Outcome, Overrides, Run};
use crate::diagnostics::{mode_balance, tail_radius, DiagnosticsReport, Histogram, Peak};
use crate::error::Result;
use crate::io::{bar_chart, fmt_f64, CsvTable};
use crate::mixture::{sample_data, ContaminationSpec, MixtureSpec};
use crate::potential::{PowerPosterior, PriorSpec};
use crate::sampler::{practical_step_size, run_chain, SamplerConfig};

/// Separated peaks must sit within this distance of `±a`.
pub const PEAK_BAND: f64 = 2.0;
pub const BALANCE_BAND: (f64, f64) = (0.4, 0.6);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Figure1Config {
    pub d: usize,
    pub n: usize,
    pub beta: f64,
    pub a_values: Vec<f64>,
    pub steps: usize,
    /// `None` selects `2.38²/(dβ)`.
    pub eta: Option<f64>,
    pub burn_in: usize,
    pub seed: u64,
    pub bin_width: f64,
    pub smoothing: usize,
    /// Smoothed maxima below this fraction of the tallest bin are ignored.
    pub peak_floor: f64,
    pub tail_eps: f64,
    pub tail_factor: f64,
}

impl Default for Figure1Config {
    fn default() -> Self {
        Self {
            d: 10,
            n: 100,
            beta: 8.0,
            a_values: vec![0.0, 5.0],
            steps: 100_000,
            eta: None,
            burn_in: 0,
            seed: 1,
            bin_width: 0.25,
            smoothing: 3,
            peak_floor: 0.01,
            tail_eps: 0.01,
            tail_factor: 3.0,
        }
    }
}

impl ExperimentConfig for Figure1Config {
    const ID: &'static str = "figure1";

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
        require(!self.a_values.is_empty(), "a_values", "need at least one separation")?;
        require(self.a_values.iter().all(|a| *a >= 0.0 && a.is_finite()), "a_values", "must be finite and ≥ 0")?;
        self.settings().validate()
    }

    fn seed(&self) -> u64 {
        self.seed
    }
}

impl Figure1Config {
    pub fn settings(&self) -> PanelSettings {
        PanelSettings {
            d: self.d,
            n: self.n,
            beta: self.beta,
            steps: self.steps,
            eta: self.eta,
            burn_in: self.burn_in,
            seed: self.seed,
            bin_width: self.bin_width,
            smoothing: self.smoothing,
            peak_floor: self.peak_floor,
            tail_eps: self.tail_eps,
            tail_factor: self.tail_factor,
        }
    }
}

/// Everything one histogram panel depends on besides `a` and the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelSettings {
    pub d: usize,
    pub n: usize,
    pub beta: f64,
    pub steps: usize,
    pub eta: Option<f64>,
    pub burn_in: usize,
    pub seed: u64,
    pub bin_width: f64,
    pub smoothing: usize,
    pub peak_floor: f64,
    pub tail_eps: f64,
    pub tail_factor: f64,
}

impl PanelSettings {
    pub fn validate(&self) -> Result<()> {
        require(self.d >= 1, "d", "must be at least 1")?;
        require(self.n >= 1, "n", "must be at least 1")?;
        require(self.beta > 0.0 && self.beta.is_finite(), "beta", "must be positive")?;
        require(self.steps > self.burn_in, "steps", "must exceed burn_in")?;
        require(self.eta.is_none_or(|e| e > 0.0 && e.is_finite()), "eta", "must be positive")?;
        require(self.bin_width > 0.0, "bin_width", "must be positive")?;
        require(self.smoothing % 2 == 1, "smoothing", "window must be odd")?;
        require((0.0..1.0).contains(&self.peak_floor), "peak_floor", "must be in [0, 1)")?;
        require(self.tail_eps > 0.0 && self.tail_eps < 1.0, "tail_eps", "must be in (0, 1)")?;
        require(self.tail_factor > 0.0, "tail_factor", "must be positive")
    }

    pub fn eta(&self) -> Result<f64> {
        match self.eta {
            Some(e) => Ok(e),
            None => practical_step_size(self.d, self.beta),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub a: f64,
    pub eta: f64,
    pub e1: Histogram,
    pub e1_peaks: Vec<Peak>,
    /// Absent when `d = 1`.
    pub e2: Option<Histogram>,
    pub e2_peaks: Vec<Peak>,
    pub report: DiagnosticsReport,
    pub contaminated_points: usize,
}

impl Panel {
    /// Shape checks; names are prefixed with `prefix`.
    pub fn assertions(&self, prefix: &str) -> Vec<Assertion> {
        let centers = |p: &[Peak]| p.iter().map(|p| fmt_f64(p.center)).collect::<Vec<_>>().join(" ");
        let mut out = Vec::new();
        if self.a > 0.0 {
            let p = &self.e1_peaks;
            let ok = p.len() == 2
                && p[0].center * p[1].center < 0.0
                && p.iter().all(|q| (q.center.abs() - self.a).abs() <= PEAK_BAND);
            out.push(Assertion::check(
                format!("{prefix}e1_bimodal"),
                ok,
                format!("peaks at [{}]", centers(p)),
            ));
            let b = self.report.mode_balance;
            out.push(Assertion::check(
                format!("{prefix}mode_balance"),
                (BALANCE_BAND.0..=BALANCE_BAND.1).contains(&b),
                format!("balance {b}"),
            ));
        } else {
            out.push(Assertion::check(
                format!("{prefix}e1_unimodal"),
                self.e1_peaks.len() == 1,
                format!("peaks at [{}]", centers(&self.e1_peaks)),
            ));
        }
        if self.e2.is_some() {
            out.push(Assertion::check(
                format!("{prefix}e2_unimodal"),
                self.e2_peaks.len() == 1,
                format!("peaks at [{}]", centers(&self.e2_peaks)),
            ));
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.assertions("").iter().all(|a| a.passed)
    }
}

/// One RMRW run at separation `a`; data and chain share `settings.seed`.
pub fn run_panel(s: &PanelSettings, a: f64, contamination: Option<&ContaminationSpec>) -> Result<Panel> {
    s.validate()?;
    let spec = MixtureSpec::along_first_axis(s.d, a)?;
    let data = sample_data(&spec, contamination, s.n, s.seed)?;
    let contaminated_points = match contamination {
        Some(c) if c.gamma > 0.0 => {
            let clean = sample_data(&spec, None, s.n, s.seed)?;
            clean.rows().zip(data.rows()).filter(|(x, y)| x != y).count()
        }
        _ => 0,
    };
    let pp = PowerPosterior::new(spec, data, s.beta, PriorSpec::UniformImproper)?;
    let eta = s.eta()?;
    let trace = run_chain(&pp, &SamplerConfig::rmrw(eta, s.steps, s.seed))?;
    let e1 = unit(s.d, 0);
    let radius = s.tail_factor * tail_radius(s.d, a, s.beta, s.tail_eps)?;
    let report = DiagnosticsReport::for_trace(&trace, &e1, s.burn_in, radius)?;
    let project = |dir: &[f64]| -> Result<Histogram> {
        let v: Vec<f64> = trace.projection(dir).into_iter().skip(s.burn_in).collect();
        Histogram::from_values(&v, s.bin_width)
    };
    let h1 = project(&e1)?;
    let h2 = if s.d > 1 { Some(project(&unit(s.d, 1))?) } else { None };
    debug_assert_eq!(report.mode_balance, mode_balance(&trace, &e1, s.burn_in)?);
    Ok(Panel {
        a,
        eta,
        e1_peaks: h1.peaks(s.smoothing, s.peak_floor),
        e2_peaks: h2.as_ref().map(|h| h.peaks(s.smoothing, s.peak_floor)).unwrap_or_default(),
        e1: h1,
        e2: h2,
        report,
        contaminated_points,
    })
}

pub(crate) fn histogram_table(h: &Histogram, window: usize) -> CsvTable {
    let mut t = CsvTable::new(&["bin_left", "bin_center", "count", "smoothed"]);
    for (i, (c, s)) in h.counts.iter().zip(h.smoothed(window)).enumerate() {
        t.push(vec![fmt_f64(h.edge(i)), fmt_f64(h.center(i)), c.to_string(), fmt_f64(s)]);
    }
    t
}

pub(crate) fn write_panel(run: &mut Run, stem: &str, p: &Panel, window: usize) -> Result<()> {
    let hists = [("e1", Some(&p.e1)), ("e2", p.e2.as_ref())];
    for (dir, h) in hists {
        let Some(h) = h else { continue };
        run.csv(&format!("{stem}_{dir}.csv"), &histogram_table(h, window))?;
        let bars: Vec<(f64, f64)> = (0..h.counts.len()).map(|i| (h.center(i), h.counts[i] as f64)).collect();
        let title = format!("RMRW iterates projected on {dir}, a = {}", label(p.a));
        let svg = bar_chart(run.hash(), &title, &format!("θ·{dir}"), &bars, h.width);
        run.svg(&format!("{stem}_{dir}.svg"), &svg)?;
    }
    run.json(&format!("{stem}_diagnostics.json"), p)
}

pub fn run_figure1(cfg: &Figure1Config, out: &std::path::Path) -> Result<Outcome> {
    let mut run = Run::start(out, cfg)?;
    let settings = cfg.settings();
    let mut assertions = Vec::new();
    let mut summary = Vec::new();
    for &a in &cfg.a_values {
        let p = run_panel(&settings, a, None)?;
        let stem = format!("a{}", label(a));
        write_panel(&mut run, &stem, &p, cfg.smoothing)?;
        assertions.extend(p.assertions(&format!("{stem}/")));
        assertions.push(Assertion::check(
            format!("{stem}/tail_mass"),
            p.report.tail_mass_outside < cfg.tail_eps,
            format!(
                "mass {} outside radius {}",
                p.report.tail_mass_outside, p.report.tail_radius
            ),
        ));
        summary.push(json!({
            "a": a,
            "eta": p.eta,
            "acceptance_rate": p.report.acceptance_rate,
            "mode_balance": p.report.mode_balance,
            "e1_peaks": p.e1_peaks,
            "e2_peaks": p.e2_peaks,
        }));
    }
    run.finish(assertions, json!({ "panels": summary }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Figure1Config {
        Figure1Config {
            d: 2,
            n: 50,
            steps: 4000,
            a_values: vec![0.0, 3.0],
            ..Default::default()
        }
    }

    #[test]
    fn overrides_replace_the_separated_value() {
        let mut c = Figure1Config::default();
        c.apply(&Overrides {
            a: Some(4.0),
            steps: Some(10),
            ..Default::default()
        });
        assert_eq!(c.a_values, vec![0.0, 4.0]);
        assert_eq!(c.steps, 10);
        c.burn_in = 10;
        assert!(c.validate().is_err());
    }

    #[test]
    fn small_run_writes_referenced_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_figure1(&small(), dir.path()).unwrap();
        for name in ["a0_e1.csv", "a3_e2.svg", "a3_diagnostics.json", "assertions.json"] {
            let p = dir.path().join(name);
            assert!(p.exists(), "{name}");
        }
        let csv = crate::io::manifest_reference(&dir.path().join("a3_e1.csv")).unwrap();
        assert_eq!(csv.as_deref(), Some(out.manifest_hash.as_str()));
        let svg = crate::io::manifest_reference(&dir.path().join("a3_e1.svg")).unwrap();
        assert_eq!(svg.as_deref(), Some(out.manifest_hash.as_str()));
        assert!(out.assertion("a3/e1_bimodal").is_some());
    }

    #[test]
    fn panel_checks_follow_peaks() {
        let p = run_panel(&small().settings(), 3.0, None).unwrap();
        let names: Vec<String> = p.assertions("x/").into_iter().map(|a| a.name).collect();
        assert_eq!(names, ["x/e1_bimodal", "x/mode_balance", "x/e2_unimodal"]);
        let total: u64 = p.e1.counts.iter().sum();
        assert_eq!(total, 4001);
    }
}
