//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line and then
//! asserts, so `cargo test --test acceptance -- --nocapture` doubles as a
//! report. Tests hold a lock so wall-clock budgets are measured alone.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rmrw::experiments::{
    run_ablation, run_contamination, run_figure1, run_generate_data, run_sample, run_scaling, run_validate_theory,
    AblationConfig, ContaminationConfig, Figure1Config, GenerateConfig, Outcome, SampleConfig, ScalingConfig, Suite,
    ValidateConfig,
};

static SERIAL: Mutex<()> = Mutex::new(());

type Driver = Box<dyn Fn(&Path) -> Outcome>;

fn report(id: &str, title: &str, ok: bool, detail: String) {
    println!("{} criterion {id}: {title} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {detail}");
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

/// All named assertions present and passing; failures listed in the detail.
fn named(outcome: &Outcome, names: &[&str]) -> (bool, String) {
    let mut bad = Vec::new();
    for n in names {
        match outcome.assertion(n) {
            Some(a) if a.passed => {}
            Some(a) => bad.push(format!("{n}: {}", a.detail)),
            None => bad.push(format!("{n}: missing")),
        }
    }
    (bad.is_empty(), if bad.is_empty() { "ok".into() } else { bad.join("; ") })
}

fn suite(s: Suite, names: &[&str]) -> (bool, String, Duration) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ValidateConfig {
        suites: vec![s],
        ..Default::default()
    };
    let (outcome, took) = timed(|| run_validate_theory(&cfg, dir.path()).unwrap());
    let full: Vec<String> = names.iter().map(|n| format!("{}/{n}", s.name())).collect();
    let refs: Vec<&str> = full.iter().map(String::as_str).collect();
    let (ok, detail) = named(&outcome, &refs);
    (ok && outcome.passed, detail, took)
}

#[test]
fn c01_figure1() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let dir = tempfile::tempdir().unwrap();
    let (outcome, took) = timed(|| run_figure1(&Figure1Config::default(), dir.path()).unwrap());
    let (ok, detail) = named(
        &outcome,
        &["a5/e1_bimodal", "a5/mode_balance", "a0/e1_unimodal", "a0/e2_unimodal", "a5/e2_unimodal"],
    );
    let fast = took < Duration::from_secs(60);
    report("1", "figure-1 histograms", ok && fast, format!("{detail}; {:.1} s", took.as_secs_f64()));
}

#[test]
fn c02_reflection_ablation() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let dir = tempfile::tempdir().unwrap();
    let cfg = AblationConfig {
        a_values: vec![5.0],
        ..Default::default()
    };
    let (outcome, took) = timed(|| run_ablation(&cfg, dir.path()).unwrap());
    let (ok, detail) = named(&outcome, &["a5/rmrw_balanced", "a5/mrw_trapped"]);
    let fast = took < Duration::from_secs(120);
    report("2", "reflection ablation", ok && fast, format!("{detail}; {:.1} s", took.as_secs_f64()));
}

#[test]
fn c03_derivative_oracle() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let (ok, detail, _) = suite(
        Suite::Derivatives,
        &["gradient_finite_difference", "hessian_finite_difference", "stationary_points"],
    );
    report("3", "gradient/Hessian oracle", ok, detail);
}

#[test]
fn c04_curvature_floor() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let (ok, detail, _) = suite(Suite::Curvature, &["curvature_floor"]);
    report("4", "curvature floor", ok, detail);
}

#[test]
fn c05_dissipativity() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let (ok, detail, _) = suite(
        Suite::Dissipativity,
        &[
            "dissipativity_population",
            "dissipativity_empirical_replications",
            "dissipativity_contaminated_replications",
        ],
    );
    report("5", "dissipativity", ok, detail);
}

#[test]
fn c06_poincare() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let (ok, detail, took) = suite(
        Suite::Poincare,
        &["poincare_analytic_constants", "cheeger_inequality", "poincare_combination"],
    );
    let fast = took < Duration::from_secs(300);
    report("6", "Poincaré machinery", ok && fast, format!("{detail}; {:.1} s", took.as_secs_f64()));
}

#[test]
fn c07_quasiconcave_isoperimetry() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let (ok, detail, _) = suite(Suite::Isoperimetry, &["quasiconcave_isoperimetry"]);
    report("7", "quasi-concave isoperimetry", ok, detail);
}

#[test]
fn c08_structure() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let (ok, detail, _) = suite(
        Suite::Structure,
        &["structure_marginal_unimodal", "structure_conditional_log_concave"],
    );
    report("8", "structure lemma", ok, detail);
}

#[test]
fn c09_exact_kernel() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let (ok, detail, _) = suite(
        Suite::Kernel,
        &[
            "kernel_row_sums",
            "kernel_detailed_balance",
            "kernel_conductance_ratio",
            "kernel_overlap_a2_beta4",
            "kernel_overlap_a3_beta50",
        ],
    );
    report("9", "exact-kernel checks", ok, detail);
}

#[test]
fn c10_mixing_scaling() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let dir = tempfile::tempdir().unwrap();
    let (outcome, took) = timed(|| run_scaling(&ScalingConfig::default(), dir.path()).unwrap());
    let (ok, detail) = named(
        &outcome,
        &["d1_a2/single_chain_tv", "all_estimates_finite", "slope_below_max"],
    );
    report(
        "10",
        "mixing at desk scale",
        ok,
        format!("{detail}; slope {}; {:.1} s", outcome.summary["slope"], took.as_secs_f64()),
    );
}

#[test]
fn c11_tail_bounds() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let (quad_ok, quad_detail, _) = suite(Suite::Tails, &["tail_mass_calibrated"]);
    let dir = tempfile::tempdir().unwrap();
    let cfg = Figure1Config {
        a_values: vec![5.0],
        ..Default::default()
    };
    let outcome = run_figure1(&cfg, dir.path()).unwrap();
    let (trace_ok, trace_detail) = named(&outcome, &["a5/tail_mass"]);
    report(
        "11",
        "tail bounds",
        quad_ok && trace_ok,
        format!("quadrature: {quad_detail}; trace: {trace_detail}"),
    );
}

#[test]
fn c12_empirical_process() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let (ok, detail, _) = suite(
        Suite::Empirical,
        &["empirical_process_ratio", "contaminated_deviation_linear"],
    );
    report("12", "empirical-process scaling", ok, detail);
}

/// Bytes of every CSV, JSON and SVG under `dir`, keyed by relative path.
fn artifacts(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(p) = stack.pop() {
        for e in std::fs::read_dir(&p).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if matches!(path.extension().and_then(|x| x.to_str()), Some("csv" | "json" | "svg")) {
                let key = path.strip_prefix(dir).unwrap().display().to_string();
                out.insert(key, std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn rerun_identical(name: &str, run: impl Fn(&Path) -> Outcome) -> Result<usize, String> {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (x, y) = (run(a.path()), run(b.path()));
    if x.manifest_hash != y.manifest_hash {
        return Err(format!("{name}: manifest hash differs"));
    }
    let (fa, fb) = (artifacts(a.path()), artifacts(b.path()));
    if fa.is_empty() {
        return Err(format!("{name}: no artifacts"));
    }
    if fa.keys().ne(fb.keys()) {
        return Err(format!("{name}: artifact sets differ"));
    }
    match fa.iter().find(|(k, v)| fb[*k] != **v) {
        Some((k, _)) => Err(format!("{name}: {k} differs")),
        None => Ok(fa.len()),
    }
}

#[test]
fn c13_determinism() {
    let _g = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let checks: Vec<(&str, Driver)> = vec![
        (
            "figure1",
            Box::new(|p| {
                let c = Figure1Config {
                    steps: 20_000,
                    ..Default::default()
                };
                run_figure1(&c, p).unwrap()
            }),
        ),
        (
            "ablation",
            Box::new(|p| {
                let c = AblationConfig {
                    steps: 20_000,
                    ..Default::default()
                };
                run_ablation(&c, p).unwrap()
            }),
        ),
        (
            "contamination",
            Box::new(|p| {
                let c = ContaminationConfig {
                    steps: 10_000,
                    gammas: vec![0.0, 0.1],
                    replications: 2,
                    ..Default::default()
                };
                run_contamination(&c, p).unwrap()
            }),
        ),
        (
            "scaling",
            Box::new(|p| {
                let c = ScalingConfig {
                    d_list: vec![1],
                    a_list: vec![0.0, 2.0],
                    chains: 100,
                    max_steps: 200,
                    steps: 5_000,
                    ..Default::default()
                };
                run_scaling(&c, p).unwrap()
            }),
        ),
        (
            "validate-theory",
            Box::new(|p| {
                let c = ValidateConfig {
                    suites: vec![Suite::Derivatives, Suite::Poincare, Suite::Tails],
                    ..Default::default()
                };
                run_validate_theory(&c, p).unwrap()
            }),
        ),
        ("sample", Box::new(|p| run_sample(&SampleConfig::default(), p).unwrap())),
        (
            "generate-data",
            Box::new(|p| {
                let c = GenerateConfig {
                    gamma: 0.2,
                    ..Default::default()
                };
                run_generate_data(&c, p).unwrap()
            }),
        ),
    ];
    let mut files = 0;
    let mut errors = Vec::new();
    for (name, f) in &checks {
        match rerun_identical(name, f) {
            Ok(n) => files += n,
            Err(e) => errors.push(e),
        }
    }
    let detail = if errors.is_empty() {
        format!("{files} artifacts identical across {} commands", checks.len())
    } else {
        errors.join("; ")
    };
    report("13", "determinism", errors.is_empty(), detail);
}
