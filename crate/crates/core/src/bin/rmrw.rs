//! Command-line front end for the experiment drivers.
//!
//! Exit status: 0 when every gating assertion passes, 1 when one fails, 2 on
//! usage, configuration or runtime errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rmrw::experiments::{
    self, load_config, AblationConfig, ContaminationConfig, ExperimentConfig, Figure1Config, GenerateConfig, Outcome,
    Overrides, SampleConfig, ScalingConfig, Suite, ValidateConfig,
};
use rmrw::sampler::Algorithm;

#[derive(Parser)]
#[command(name = "rmrw", version, about = "Reflected random-walk Metropolis experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// TOML config; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    eta: Option<f64>,
    #[arg(long, global = true)]
    steps: Option<usize>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    a: Option<f64>,
    #[arg(long, global = true)]
    d: Option<usize>,
    #[arg(long, global = true)]
    n: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Projected histograms at a = 0 and a = 5.
    Figure1,
    /// RMRW against MRW from a single-mode start.
    Ablation,
    /// Diagnostics over a contamination sweep.
    Contamination {
        #[arg(long, value_delimiter = ',')]
        gammas: Option<Vec<f64>>,
        #[arg(long)]
        k: Option<f64>,
    },
    /// Mixing-time sweep over d and a.
    Scaling {
        #[arg(long, value_delimiter = ',')]
        d_list: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        a_list: Option<Vec<f64>>,
        #[arg(long)]
        chains: Option<usize>,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Numeric lemma suites.
    ValidateTheory {
        /// `all` or a comma-separated list.
        #[arg(long)]
        suites: Option<String>,
    },
    /// One raw chain run.
    Sample {
        #[arg(long, value_parser = parse_algorithm)]
        algorithm: Option<Algorithm>,
        /// Dataset CSV written by generate-data.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Draw a dataset.
    GenerateData {
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        point_mass: Option<Vec<f64>>,
    },
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    match s {
        "rmrw" => Ok(Algorithm::Rmrw),
        "mrw" => Ok(Algorithm::Mrw),
        _ => Err(format!("unknown algorithm `{s}` (rmrw or mrw)")),
    }
}

fn config<C: ExperimentConfig>(c: &Common, edit: impl FnOnce(&mut C)) -> rmrw::Result<C> {
    let o = Overrides {
        seed: c.seed,
        eta: c.eta,
        steps: c.steps,
        beta: c.beta,
        a: c.a,
        d: c.d,
        n: c.n,
    };
    let mut cfg: C = load_config(c.config.as_deref(), &o)?;
    edit(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cli: &Cli) -> rmrw::Result<Outcome> {
    let c = &cli.common;
    let out: &Path = &c.out;
    match &cli.command {
        Command::Figure1 => experiments::run_figure1(&config::<Figure1Config>(c, |_| {})?, out),
        Command::Ablation => experiments::run_ablation(&config::<AblationConfig>(c, |_| {})?, out),
        Command::Contamination { gammas, k } => {
            let cfg = config::<ContaminationConfig>(c, |x| {
                x.gammas = gammas.clone().unwrap_or(x.gammas.clone());
                x.k = k.unwrap_or(x.k);
            })?;
            experiments::run_contamination(&cfg, out)
        }
        Command::Scaling { d_list, a_list, chains, max_steps } => {
            let cfg = config::<ScalingConfig>(c, |x| {
                x.d_list = d_list.clone().unwrap_or(x.d_list.clone());
                x.a_list = a_list.clone().unwrap_or(x.a_list.clone());
                x.chains = chains.unwrap_or(x.chains);
                x.max_steps = max_steps.unwrap_or(x.max_steps);
            })?;
            experiments::run_scaling(&cfg, out)
        }
        Command::ValidateTheory { suites } => {
            let parsed = suites.as_deref().map(Suite::parse_list).transpose()?;
            let cfg = config::<ValidateConfig>(c, |x| {
                x.suites = parsed.unwrap_or(x.suites.clone());
            })?;
            experiments::run_validate_theory(&cfg, out)
        }
        Command::Sample { algorithm, data } => {
            let cfg = config::<SampleConfig>(c, |x| {
                x.algorithm = algorithm.unwrap_or(x.algorithm);
                x.data = data.clone().or(x.data.clone());
            })?;
            experiments::run_sample(&cfg, out)
        }
        Command::GenerateData { gamma, k, point_mass } => {
            let cfg = config::<GenerateConfig>(c, |x| {
                x.gamma = gamma.unwrap_or(x.gamma);
                x.k = k.unwrap_or(x.k);
                x.point_mass = point_mass.clone().or(x.point_mass.clone());
            })?;
            experiments::run_generate_data(&cfg, out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    experiments::configure_jobs(cli.common.jobs);
    match dispatch(&cli) {
        Ok(outcome) => {
            for a in &outcome.assertions {
                let tag = match (a.passed, a.gating) {
                    (true, _) => "PASS",
                    (false, true) => "FAIL",
                    (false, false) => "NOTE",
                };
                println!("{tag} {} {}", a.name, a.detail);
            }
            println!(
                "{} {} manifest={} out={}",
                if outcome.passed { "PASSED" } else { "FAILED" },
                outcome.experiment,
                outcome.manifest_hash,
                outcome.out_dir.display()
            );
            ExitCode::from(if outcome.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
