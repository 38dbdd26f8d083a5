//! RMRW against plain random-walk Metropolis on a well-separated posterior.
//!
//! `cargo run --release --example rmrw_sampling`

use rmrw::diagnostics::mode_balance;
use rmrw::mixture::{sample_data, MixtureSpec};
use rmrw::potential::{PowerPosterior, PriorSpec};
use rmrw::sampler::{default_step_size, practical_step_size, run_chain, Algorithm, Init, SamplerConfig};

fn main() -> rmrw::Result<()> {
    let (d, a, beta) = (5, 4.0, 8.0);
    let spec = MixtureSpec::along_first_axis(d, a)?;
    let data = sample_data(&spec, None, 200, 1)?;
    let pp = PowerPosterior::new(spec, data, beta, PriorSpec::UniformImproper)?;

    let eta = practical_step_size(d, beta)?;
    println!("η = {eta:.4} (theory step size would be {:.2e})", default_step_size(d, a, beta, 0.1 / (2.0 * beta))?);

    let mut start = vec![0.0; d];
    start[0] = a;
    let cfg = SamplerConfig::rmrw(eta, 50_000, 11).with_init(Init::Fixed(start));
    let e1 = {
        let mut e = vec![0.0; d];
        e[0] = 1.0;
        e
    };
    for alg in [Algorithm::Rmrw, Algorithm::Mrw] {
        let tr = run_chain(&pp, &cfg.clone().with_algorithm(alg))?;
        println!(
            "{alg:?}: acceptance {:.3}, reflected proposals {:.3}, balance {:.3}",
            tr.acceptance_rate,
            tr.reflection_rate(),
            mode_balance(&tr, &e1, 0)?
        );
    }
    Ok(())
}
