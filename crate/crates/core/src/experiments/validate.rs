//! Numeric falsification suites for the geometric inequalities.
//!
//! Each suite returns lemma reports (worst margin over a randomised family,
//! with a witness) plus a few detector-sanity checks. The run passes iff every
//! report's worst margin is at least `−tolerance` and every check passes.

use std::collections::BTreeMap;
use std::str::FromStr;

use nalgebra::SymmetricEigen;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{label, require, Assertion, ExperimentConfig, Outcome, Overrides, Run};
use crate::diagnostics::{build_reference, tail_radius, tail_radius_with_constant, Level};
use crate::error::{Error, Result};
use crate::grid::{Axis, Grid};
use crate::io::CsvTable;
use crate::mixture::{norm, sample_data, ContaminationSpec, MixtureSpec, Noise};
use crate::potential::{DissipativityBound, PowerPosterior, PriorSpec};
use crate::rng::{self, Stream};
use crate::sampler::{practical_step_size, Algorithm};
use crate::theory::{
    admissible_pairs, build_grid_kernel, check_dissipativity_field, check_kernel_overlap, check_poincare_combination,
    check_quasiconcave_isoperimetry, check_structure, cheeger_constant, contamination_deviation_sweep,
    empirical_process_sweep, overlap_step_limit, poincare_constant, quasiconcave_isoperimetry_unchecked,
    random::{random_mixture_1d, random_nonproduct_2d, random_unimodal},
    uniform_ball, EmpiricalSweepConfig, GridDensity, LemmaReport, MarginTracker, QUADRATIC_SHARE, LEMMA_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Derivatives,
    Curvature,
    Dissipativity,
    Poincare,
    Isoperimetry,
    Structure,
    Kernel,
    Empirical,
    Tails,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Derivatives,
        Suite::Curvature,
        Suite::Dissipativity,
        Suite::Poincare,
        Suite::Isoperimetry,
        Suite::Structure,
        Suite::Kernel,
        Suite::Empirical,
        Suite::Tails,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Derivatives => "derivatives",
            Suite::Curvature => "curvature",
            Suite::Dissipativity => "dissipativity",
            Suite::Poincare => "poincare",
            Suite::Isoperimetry => "isoperimetry",
            Suite::Structure => "structure",
            Suite::Kernel => "kernel",
            Suite::Empirical => "empirical",
            Suite::Tails => "tails",
        }
    }

    /// `all` or a comma-separated list of suite names.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        if s.trim() == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        let mut out: Vec<Suite> = s.split(',').map(|p| p.trim().parse()).collect::<Result<_>>()?;
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::invalid("suites", format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateConfig {
    pub suites: Vec<Suite>,
    pub seed: u64,
    /// Random points per dimension for the derivative oracle.
    pub derivative_points: usize,
    pub curvature_points: usize,
    pub population_points: usize,
    pub replications: usize,
    pub replication_points: usize,
    pub replication_pass_rate: f64,
    pub delta: f64,
    pub contamination_gamma: f64,
    pub contamination_k: f64,
    pub cheeger_densities: usize,
    pub combination_instances: usize,
    pub unimodal_densities: usize,
    pub partitions_per_density: usize,
    pub structure_points: usize,
    pub overlap_pairs: usize,
    pub empirical_reps: usize,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self {
            suites: Suite::ALL.to_vec(),
            seed: 1,
            derivative_points: 100,
            curvature_points: 1000,
            population_points: 10_000,
            replications: 100,
            replication_points: 200,
            replication_pass_rate: 0.95,
            delta: 0.05,
            contamination_gamma: 0.01,
            contamination_k: 2.0,
            cheeger_densities: 50,
            combination_instances: 20,
            unimodal_densities: 10,
            partitions_per_density: 1000,
            structure_points: 400,
            overlap_pairs: 100,
            empirical_reps: 50,
        }
    }
}

impl ExperimentConfig for ValidateConfig {
    const ID: &'static str = "validate-theory";

    fn apply(&mut self, o: &Overrides) {
        self.seed = o.seed.unwrap_or(self.seed);
    }

    fn validate(&self) -> Result<()> {
        require(!self.suites.is_empty(), "suites", "select at least one suite")?;
        require(self.delta > 0.0 && self.delta < 1.0, "delta", "must be in (0, 1)")?;
        require((0.0..=1.0).contains(&self.replication_pass_rate), "replication_pass_rate", "must be in [0, 1]")?;
        let counts = [
            self.derivative_points,
            self.curvature_points,
            self.population_points,
            self.replications,
            self.replication_points,
            self.cheeger_densities,
            self.combination_instances,
            self.unimodal_densities,
            self.partitions_per_density,
            self.overlap_pairs,
            self.empirical_reps,
        ];
        require(counts.iter().all(|&c| c > 0), "counts", "every sample count must be positive")?;
        require(self.structure_points >= crate::theory::MIN_STRUCTURE_POINTS, "structure_points", "grid too coarse")
    }

    fn seed(&self) -> u64 {
        self.seed
    }
}

#[derive(Debug, Default)]
struct SuiteResult {
    reports: Vec<LemmaReport>,
    checks: Vec<Assertion>,
}

/// The `(a, β)` grid shared by the curvature and dissipativity suites.
const SEPARATIONS: [f64; 3] = [0.5, 2.0, 5.0];
const BETAS: [f64; 3] = [1.0, 4.0, 16.0];

fn population(d: usize, a: f64, beta: f64) -> Result<PowerPosterior> {
    PowerPosterior::population_only(MixtureSpec::along_first_axis(d, a)?, beta, PriorSpec::UniformImproper)
}

fn random_direction(rng: &mut rng::Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = norm(&v);
        if r > 0.1 && r <= 1.0 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

/// Relative error with a unit floor on the denominator.
fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

fn derivatives(cfg: &ValidateConfig) -> Result<SuiteResult> {
    const GRAD_TOL: f64 = 1e-5;
    const HESS_TOL: f64 = 1e-4;
    const STATIONARY_TOL: f64 = 1e-8;
    let mut grad = MarginTracker::new("gradient_finite_difference", 0.0);
    let mut hess = MarginTracker::new("hessian_finite_difference", 0.0);
    let mut stat = MarginTracker::new("stationary_points", 0.0);
    let mut rng = rng::stream(cfg.seed, Stream::Lab);
    for d in [1usize, 2, 3, 5] {
        let a = rng.random_range(0.5..3.0);
        let beta = rng.random_range(0.5..8.0);
        let theta0: Vec<f64> = random_direction(&mut rng, d).into_iter().map(|x| x * a).collect();
        let pp = PowerPosterior::population_only(MixtureSpec::new(theta0.clone())?, beta, PriorSpec::UniformImproper)?;
        for _ in 0..cfg.derivative_points {
            let r = rng.random_range(0.0..2.0 * (1.0 + a));
            let theta: Vec<f64> = random_direction(&mut rng, d).into_iter().map(|x| x * r).collect();
            let g = pp.population_gradient(&theta)?;
            let h = pp.population_hessian(&theta)?;
            let step = 1e-5 * (1.0 + r);
            let hstep = 1e-3 * (1.0 + r);
            let u = |t: &[f64]| pp.population_potential(t);
            let u0 = u(&theta)?;
            let mut worst_g: f64 = 0.0;
            let mut worst_h: f64 = 0.0;
            let shifted = |i: usize, s: f64, j: usize, t: f64| {
                let mut x = theta.clone();
                x[i] += s;
                x[j] += t;
                x
            };
            for i in 0..d {
                let fd = (u(&shifted(i, step, i, 0.0))? - u(&shifted(i, -step, i, 0.0))?) / (2.0 * step);
                worst_g = worst_g.max(rel_err(g[i], fd));
                for j in 0..d {
                    let fd = if i == j {
                        (u(&shifted(i, hstep, i, 0.0))? - 2.0 * u0 + u(&shifted(i, -hstep, i, 0.0))?) / (hstep * hstep)
                    } else {
                        (u(&shifted(i, hstep, j, hstep))? - u(&shifted(i, hstep, j, -hstep))?
                            - u(&shifted(i, -hstep, j, hstep))?
                            + u(&shifted(i, -hstep, j, -hstep))?)
                            / (4.0 * hstep * hstep)
                    };
                    worst_h = worst_h.max(rel_err(h[(i, j)], fd));
                }
            }
            grad.record(GRAD_TOL - worst_g, || json!({ "d": d, "theta": theta, "theta0": theta0, "beta": beta }));
            hess.record(HESS_TOL - worst_h, || json!({ "d": d, "theta": theta, "theta0": theta0, "beta": beta }));
        }
        for at in [theta0.clone(), vec![0.0; d]] {
            let gn = norm(&pp.population_gradient(&at)?);
            stat.record(STATIONARY_TOL - gn, || json!({ "d": d, "theta": at, "gradient_norm": gn }));
        }
    }
    Ok(SuiteResult {
        reports: vec![
            grad.finish(Some(cfg.seed), None)?,
            hess.finish(Some(cfg.seed), None)?,
            stat.finish(Some(cfg.seed), None)?,
        ],
        checks: Vec::new(),
    })
}

fn curvature(cfg: &ValidateConfig) -> Result<SuiteResult> {
    let mut t = MarginTracker::new("curvature_floor", LEMMA_TOL);
    for (k, (a, beta)) in grid_pairs().enumerate() {
        let pp = population(3, a, beta)?;
        let pts = uniform_ball(3, 3.0 * (1.0 + a), cfg.curvature_points, cfg.seed.wrapping_add(k as u64));
        for theta in pts {
            let h = pp.population_hessian(&theta)?;
            let min = SymmetricEigen::new(h).eigenvalues.min();
            t.record(min + beta * a * a, || json!({ "a": a, "beta": beta, "theta": theta, "min_eigenvalue": min }));
        }
    }
    Ok(SuiteResult {
        reports: vec![t.finish(Some(cfg.seed), None)?],
        checks: Vec::new(),
    })
}

fn grid_pairs() -> impl Iterator<Item = (f64, f64)> {
    SEPARATIONS.into_iter().flat_map(|a| BETAS.into_iter().map(move |b| (a, b)))
}

/// `⌈(d + a²) log((d + a²)/δ)⌉`.
pub(crate) fn replication_sample_size(d: usize, a: f64, delta: f64) -> usize {
    let s = d as f64 + a * a;
    (s * (s / delta).ln()).ceil() as usize
}

fn dissipativity(cfg: &ValidateConfig) -> Result<SuiteResult> {
    const D: usize = 3;
    const RADIUS: f64 = 20.0;
    let mut pop = MarginTracker::new("dissipativity_population", LEMMA_TOL);
    let mut emp = MarginTracker::new("dissipativity_empirical_replications", 0.0);
    let mut con = MarginTracker::new("dissipativity_contaminated_replications", 0.0);
    for (k, (a, beta)) in grid_pairs().enumerate() {
        let seed = cfg.seed.wrapping_add(k as u64);
        let r = check_dissipativity_field(&population(D, a, beta)?, DissipativityBound::Population, RADIUS, cfg.population_points, seed)?;
        pop.record(r.worst_margin, || json!({ "a": a, "beta": beta, "witness": r.witness }));

        let n = replication_sample_size(D, a, cfg.delta);
        let spec = MixtureSpec::along_first_axis(D, a)?;
        let noise = ContaminationSpec::new(cfg.contamination_gamma, Noise::Gaussian { mean: vec![0.0; D] }, cfg.contamination_k)?;
        let bound = DissipativityBound::Contaminated {
            gamma: cfg.contamination_gamma,
            k: cfg.contamination_k,
            delta: cfg.delta,
        };
        let outcomes = (0..cfg.replications as u64)
            .into_par_iter()
            .map(|rep| -> Result<(bool, bool)> {
                let seed = cfg.seed.wrapping_add(1000 * (k as u64 + 1) + rep);
                let pts = uniform_ball(D, RADIUS, cfg.replication_points, seed);
                let passes = |pp: &PowerPosterior, b| -> Result<bool> {
                    for th in &pts {
                        if pp.dissipativity_margin(th, b)? < -LEMMA_TOL {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                };
                let clean = PowerPosterior::new(spec.clone(), sample_data(&spec, None, n, seed)?, beta, PriorSpec::UniformImproper)?;
                let dirty = PowerPosterior::new(spec.clone(), sample_data(&spec, Some(&noise), n, seed)?, beta, PriorSpec::UniformImproper)?;
                Ok((passes(&clean, DissipativityBound::Empirical)?, passes(&dirty, bound)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let reps = outcomes.len() as f64;
        let rate_e = outcomes.iter().filter(|o| o.0).count() as f64 / reps;
        let rate_c = outcomes.iter().filter(|o| o.1).count() as f64 / reps;
        emp.record(rate_e - cfg.replication_pass_rate, || json!({ "a": a, "beta": beta, "n": n, "pass_rate": rate_e }));
        con.record(rate_c - cfg.replication_pass_rate, || json!({ "a": a, "beta": beta, "n": n, "pass_rate": rate_c }));
        emp.detail(format!("pass_rate_a{}_beta{}", label(a), label(beta)), rate_e);
        con.detail(format!("pass_rate_a{}_beta{}", label(a), label(beta)), rate_c);
    }
    Ok(SuiteResult {
        reports: vec![
            pop.finish(Some(cfg.seed), None)?,
            emp.finish(Some(cfg.seed), None)?,
            con.finish(Some(cfg.seed), None)?,
        ],
        checks: Vec::new(),
    })
}

fn line_density(lo: f64, hi: f64, m: usize, f: impl Fn(f64) -> f64) -> Result<GridDensity> {
    GridDensity::from_log_density(Grid::line(Axis::new(lo, hi, m)?), |x| f(x[0]))
}

fn poincare(cfg: &ValidateConfig) -> Result<SuiteResult> {
    const ANALYTIC_TOL: f64 = 0.02;
    let mut analytic = MarginTracker::new("poincare_analytic_constants", 0.0);
    let gauss = poincare_constant(&line_density(-6.0, 6.0, 2000, |x| -0.5 * x * x)?)?;
    let unif = poincare_constant(&line_density(0.0, 1.0, 2000, |_| 0.0)?)?;
    let pi2 = std::f64::consts::PI.powi(2);
    analytic.record(ANALYTIC_TOL - (gauss - 1.0).abs(), || json!({ "case": "gaussian", "value": gauss }));
    analytic.record(ANALYTIC_TOL - (unif * pi2 - 1.0).abs(), || json!({ "case": "uniform", "value": unif }));
    analytic.detail("gaussian", gauss);
    analytic.detail("uniform", unif);

    let mut rng = rng::stream(cfg.seed, Stream::Lab);
    let axis = Axis::symmetric(8.0, 800)?;
    let densities = (0..cfg.cheeger_densities)
        .map(|_| random_mixture_1d(&mut rng, axis))
        .collect::<Result<Vec<_>>>()?;
    let mut cheeger = MarginTracker::new("cheeger_inequality", LEMMA_TOL);
    let results = densities
        .par_iter()
        .map(|g| Ok((poincare_constant(g)?, cheeger_constant(g)?.value)))
        .collect::<Result<Vec<_>>>()?;
    for (k, (c, z)) in results.into_iter().enumerate() {
        // Relative form of `C ≤ 4/ζ²`.
        cheeger.record(1.0 - c * z * z / 4.0, || json!({ "instance": k, "poincare": c, "cheeger": z }));
    }

    let instances = (0..cfg.combination_instances)
        .map(|_| random_nonproduct_2d(&mut rng, 5.0, 40))
        .collect::<Result<Vec<_>>>()?;
    let combos = instances
        .par_iter()
        .map(check_poincare_combination)
        .collect::<Result<Vec<_>>>()?;
    let mut combination = MarginTracker::new("poincare_combination", LEMMA_TOL);
    for (k, r) in combos.into_iter().enumerate() {
        combination.record(r.worst_margin, || json!({ "instance": k, "constants": r.witness }));
    }
    Ok(SuiteResult {
        reports: vec![
            analytic.finish(None, None)?,
            cheeger.finish(Some(cfg.seed), Some(Grid::line(axis)))?,
            combination.finish(Some(cfg.seed), None)?,
        ],
        checks: Vec::new(),
    })
}

/// One report for a family: instance counts add up, the worst margin and its
/// witness (tagged with the member index) are kept.
fn fold_reports(lemma: &str, reports: &[LemmaReport], seed: Option<u64>) -> LemmaReport {
    let (k, worst) = reports
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.worst_margin.total_cmp(&b.1.worst_margin))
        .expect("at least one report");
    LemmaReport {
        lemma: lemma.to_string(),
        seed,
        grid: None,
        instances: reports.iter().map(|r| r.instances).sum(),
        skipped: reports.iter().map(|r| r.skipped).sum(),
        worst_margin: worst.worst_margin,
        tolerance: worst.tolerance,
        passed: reports.iter().all(|r| r.passed),
        witness: json!({ "member": k, "witness": worst.witness }),
        details: BTreeMap::new(),
    }
}

fn isoperimetry(cfg: &ValidateConfig) -> Result<SuiteResult> {
    let mut rng = rng::stream(cfg.seed, Stream::Lab);
    let densities = (0..cfg.unimodal_densities)
        .map(|_| random_unimodal(&mut rng, 3.0, 600))
        .collect::<Result<Vec<_>>>()?;
    let reports = densities
        .par_iter()
        .enumerate()
        .map(|(k, g)| check_quasiconcave_isoperimetry(g, cfg.partitions_per_density, cfg.seed.wrapping_add(k as u64)))
        .collect::<Result<Vec<_>>>()?;
    let report = fold_reports("quasiconcave_isoperimetry", &reports, Some(cfg.seed));

    // Two separated bumps: the pre-check must refuse it and the raw sweep must
    // find a violating partition.
    let bimodal = line_density(0.0, 3.0, 600, |x| {
        let p = (-((x - 0.6) / 0.15).powi(2)).exp() + (-((x - 2.4) / 0.15).powi(2)).exp();
        (p + 1e-6).ln()
    })?;
    let refused = matches!(
        check_quasiconcave_isoperimetry(&bimodal, 10, cfg.seed),
        Err(Error::Precondition(_))
    );
    let raw = quasiconcave_isoperimetry_unchecked(&bimodal, cfg.partitions_per_density, cfg.seed)?;
    let checks = vec![
        Assertion::check("isoperimetry/precheck_refuses_bimodal", refused, ""),
        Assertion::check(
            "isoperimetry/detector_finds_violation",
            raw.worst_margin < 0.0 && !raw.witness.is_null(),
            format!("worst margin {:?} witness {}", raw.worst_margin, raw.witness),
        ),
    ];
    Ok(SuiteResult {
        reports: vec![report],
        checks,
    })
}

fn structure(cfg: &ValidateConfig) -> Result<SuiteResult> {
    let cases: Vec<(f64, f64)> = [0.0, 1.0, 2.0]
        .into_iter()
        .flat_map(|a| [2.0, 8.0].into_iter().map(move |b| (a, b)))
        .collect();
    let m = cfg.structure_points;
    let results = cases
        .par_iter()
        .map(|&(a, beta)| {
            let pp = population(2, a, beta)?;
            let r = tail_radius(2, a, beta, 1e-3)?;
            let rep = check_structure(&pp, Axis::new(0.0, r, m)?, Axis::symmetric(r, m)?)?;
            Ok((a, beta, rep))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut marginal = MarginTracker::new("structure_marginal_unimodal", LEMMA_TOL);
    let mut conditional = MarginTracker::new("structure_conditional_log_concave", LEMMA_TOL);
    for (a, beta, rep) in results {
        marginal.record(rep.marginal.worst_margin, || json!({ "a": a, "beta": beta, "witness": rep.marginal.witness }));
        conditional.record(rep.conditional.worst_margin, || {
            json!({ "a": a, "beta": beta, "witness": rep.conditional.witness })
        });
    }
    Ok(SuiteResult {
        reports: vec![marginal.finish(Some(cfg.seed), None)?, conditional.finish(Some(cfg.seed), None)?],
        checks: Vec::new(),
    })
}

fn kernel(cfg: &ValidateConfig) -> Result<SuiteResult> {
    const ROW_TOL: f64 = 1e-12;
    const BALANCE_TOL: f64 = 1e-10;
    const CONDUCTANCE_RATIO: f64 = 10.0;
    const S: f64 = 0.1;
    let (beta, n) = (50.0, 50);
    let mut rows = MarginTracker::new("kernel_row_sums", 0.0);
    let mut balance = MarginTracker::new("kernel_detailed_balance", 0.0);
    let mut ratio = MarginTracker::new("kernel_conductance_ratio", 0.0);
    let eta = practical_step_size(1, beta)?;
    for a in [0.0, 1.0, 2.0, 3.0] {
        let spec = MixtureSpec::along_first_axis(1, a)?;
        let data = sample_data(&spec, None, n, cfg.seed)?;
        let pp = PowerPosterior::new(spec, data, beta, PriorSpec::UniformImproper)?;
        let half = tail_radius(1, a, beta, 1e-3)? + 0.5;
        let axis = Axis::symmetric(half, (100.0 * half).ceil() as usize * 2)?;
        let r = build_grid_kernel(&pp, Level::Empirical, eta, axis, Algorithm::Rmrw)?;
        let m = build_grid_kernel(&pp, Level::Empirical, eta, axis, Algorithm::Mrw)?;
        for (name, k) in [("rmrw", &r), ("mrw", &m)] {
            let e = k.row_sum_error();
            rows.record(ROW_TOL - e, || json!({ "a": a, "kernel": name, "row_sum_error": e }));
            let b = k.detailed_balance_residual();
            balance.record(BALANCE_TOL - b, || json!({ "a": a, "kernel": name, "residual": b }));
        }
        if a == 3.0 {
            let cr = r.s_conductance(S)?;
            let cm = m.s_conductance(S)?;
            // No flow at all for MRW counts as an infinite ratio.
            let q = match (cr, cm) {
                (Some(x), Some(y)) if y > 0.0 => x / y,
                (Some(_), _) => f64::INFINITY,
                (None, _) => 0.0,
            };
            let margin = if q.is_finite() { q.ln() - CONDUCTANCE_RATIO.ln() } else { f64::MAX };
            ratio.record(margin, || json!({ "a": a, "s": S, "rmrw": cr, "mrw": cm }));
            ratio.detail("rmrw_s_conductance", cr.unwrap_or(0.0));
            ratio.detail("mrw_s_conductance", cm.unwrap_or(0.0));
        }
    }

    let mut overlap = Vec::new();
    for (a, b) in [(2.0, 4.0), (3.0, 50.0)] {
        let pp = population(1, a, b)?;
        let radius = tail_radius(1, a, b, 1e-3)?;
        let step = overlap_step_limit(radius, 1);
        let pairs = admissible_pairs(step, cfg.overlap_pairs, cfg.seed);
        let mut rep = check_kernel_overlap(&pp, step, &pairs, radius, Some(cfg.seed))?;
        rep.lemma = format!("kernel_overlap_a{}_beta{}", label(a), label(b));
        overlap.push(rep);
    }
    let mut reports = vec![
        rows.finish(Some(cfg.seed), None)?,
        balance.finish(Some(cfg.seed), None)?,
        ratio.finish(Some(cfg.seed), None)?,
    ];
    reports.extend(overlap);
    Ok(SuiteResult {
        reports,
        checks: Vec::new(),
    })
}

fn empirical(cfg: &ValidateConfig) -> Result<SuiteResult> {
    const RATIO_RANGE: (f64, f64) = (0.35, 0.7);
    let spec = MixtureSpec::new(vec![1.0])?;
    let sweep_cfg = |n_list: Vec<usize>, seed: u64| EmpiricalSweepConfig {
        a_radius: 3.0,
        m_radius: 3.0,
        points_per_axis: 51,
        n_list,
        reps: cfg.empirical_reps,
        seed,
    };
    let sweep = empirical_process_sweep(&spec, &sweep_cfg(vec![250, 1000, 4000], cfg.seed), None)?;
    let mut ratio = MarginTracker::new("empirical_process_ratio", 0.0);
    for (k, r) in sweep.ratios.iter().enumerate() {
        let n = sweep.n_list[k];
        ratio.record((r - RATIO_RANGE.0).min(RATIO_RANGE.1 - r), || json!({ "n": n, "ratio": r }));
        ratio.detail(format!("ratio_{}_{}", sweep.n_list[k + 1], n), *r);
    }
    ratio.detail("slope", sweep.slope);

    let gammas = [0.0, 0.01, 0.02, 0.04];
    let noise = Noise::Gaussian { mean: vec![0.0] };
    let c = contamination_deviation_sweep(&spec, &sweep_cfg(vec![1000], cfg.seed.wrapping_add(1)), &gammas, &noise, 2.0)?;
    let gmax = gammas[gammas.len() - 1];
    let mut linear = MarginTracker::new("contaminated_deviation_linear", 0.0);
    linear.record(c.linear.min(QUADRATIC_SHARE * c.linear - c.quadratic.abs() * gmax), || json!(c));
    linear.detail("linear", c.linear);
    linear.detail("quadratic", c.quadratic);
    Ok(SuiteResult {
        reports: vec![ratio.finish(Some(cfg.seed), None)?, linear.finish(Some(cfg.seed), None)?],
        checks: Vec::new(),
    })
}

fn tails(cfg: &ValidateConfig) -> Result<SuiteResult> {
    const C: f64 = 3.0;
    let mut t = MarginTracker::new("tail_mass_calibrated", 0.0);
    for d in [1usize, 2] {
        for a in [0.0, 2.0] {
            for beta in [1.0, 8.0] {
                let spec = MixtureSpec::along_first_axis(d, a)?;
                let data = sample_data(&spec, None, 100, cfg.seed)?;
                let pp = PowerPosterior::new(spec, data, beta, PriorSpec::UniformImproper)?;
                let widest = tail_radius_with_constant(d, a, beta, 0.1, C)?;
                let points = if d == 1 { 4000 } else { 400 };
                let reference = build_reference(&pp, Grid::cube(d, 1.25 * widest, points)?, Level::Empirical)?;
                for eps in [0.1, 0.01] {
                    let r = tail_radius_with_constant(d, a, beta, eps, C)?;
                    let mass = reference.tail_mass(r);
                    t.record(eps - mass, || json!({ "d": d, "a": a, "beta": beta, "eps": eps, "radius": r, "mass": mass }));
                }
            }
        }
    }
    Ok(SuiteResult {
        reports: vec![t.finish(Some(cfg.seed), None)?],
        checks: Vec::new(),
    })
}

fn run_suite(s: Suite, cfg: &ValidateConfig) -> Result<SuiteResult> {
    match s {
        Suite::Derivatives => derivatives(cfg),
        Suite::Curvature => curvature(cfg),
        Suite::Dissipativity => dissipativity(cfg),
        Suite::Poincare => poincare(cfg),
        Suite::Isoperimetry => isoperimetry(cfg),
        Suite::Structure => structure(cfg),
        Suite::Kernel => kernel(cfg),
        Suite::Empirical => empirical(cfg),
        Suite::Tails => tails(cfg),
    }
}

pub fn run_validate_theory(cfg: &ValidateConfig, out: &std::path::Path) -> Result<Outcome> {
    let mut run = Run::start(out, cfg)?;
    let mut header = vec!["suite"];
    header.extend(LemmaReport::SUMMARY_HEADER);
    let mut table = CsvTable::new(&header);
    let mut assertions = Vec::new();
    let mut worst = BTreeMap::new();
    for &s in &cfg.suites {
        log::info!("validate-theory: running suite {}", s.name());
        let res = run_suite(s, cfg)?;
        for r in &res.reports {
            let mut row = vec![s.name().to_string()];
            row.extend(r.summary_row());
            table.push(row);
            assertions.push(Assertion::check(
                format!("{}/{}", s.name(), r.lemma),
                r.passed,
                format!("worst margin {:?} over {} instances", r.worst_margin, r.instances),
            ));
        }
        let min = res.reports.iter().map(|r| r.worst_margin).fold(f64::INFINITY, f64::min);
        worst.insert(s.name(), min);
        run.json(&format!("{}.json", s.name()), &res.reports)?;
        assertions.extend(res.checks);
    }
    run.csv("summary.csv", &table)?;
    run.finish(assertions, json!({ "worst_margin_by_suite": worst }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_list_parsing() {
        assert_eq!(Suite::parse_list("all").unwrap().len(), 9);
        assert_eq!(
            Suite::parse_list("tails, kernel,tails").unwrap(),
            vec![Suite::Kernel, Suite::Tails]
        );
        assert!(Suite::parse_list("bogus").is_err());
    }

    #[test]
    fn sample_size_rule() {
        assert_eq!(replication_sample_size(3, 0.0, 0.05), 13);
        assert!(replication_sample_size(3, 5.0, 0.05) > replication_sample_size(3, 2.0, 0.05));
    }

    #[test]
    fn tails_suite_passes() {
        let r = tails(&ValidateConfig::default()).unwrap();
        assert!(r.reports[0].passed, "{:?}", r.reports[0]);
    }
}
