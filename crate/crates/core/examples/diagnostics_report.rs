//! Grid reference, single-chain TV, ESS and an across-chain mixing curve in
//! one dimension.
//!
//! `cargo run --release --example diagnostics_report`

use rmrw::diagnostics::{build_reference, ess, mixing_time_estimate, tail_radius, tv_to_reference, Level};
use rmrw::grid::Grid;
use rmrw::mixture::{sample_data, MixtureSpec};
use rmrw::potential::{PowerPosterior, PriorSpec};
use rmrw::sampler::{practical_step_size, run_chain, SamplerConfig};

fn main() -> rmrw::Result<()> {
    let (a, beta) = (2.0, 50.0);
    let spec = MixtureSpec::along_first_axis(1, a)?;
    let data = sample_data(&spec, None, 50, 1)?;
    let pp = PowerPosterior::new(spec, data, beta, PriorSpec::UniformImproper)?;

    // Fine grid over R_{0.001}, summed back to 0.4-wide cells.
    let r = tail_radius(1, a, beta, 1e-3)? + 0.3;
    let points = 8 * (2.0 * r / 0.4).ceil() as usize;
    let reference = build_reference(&pp, Grid::cube(1, r, points)?, Level::Empirical)?.coarsen(8)?;

    let eta = practical_step_size(1, beta)?;
    let cfg = SamplerConfig::rmrw(eta, 100_000, 7);
    let tr = run_chain(&pp, &cfg)?;
    println!("single chain TV after 10⁵ steps: {:.4}", tv_to_reference(&[&tr], &reference, 1000)?);
    let e = ess(&tr, 1000)?;
    println!("ESS: {:.0}", e.per_coordinate[0]);

    let curve = mixing_time_estimate(&pp, &cfg, &reference, 500, 500)?;
    for (t, tv) in curve.checkpoints.iter().zip(&curve.tv) {
        println!("t = {t:>4}  TV = {tv:.4}");
    }
    println!("T(0.1) = {:?}, iid floor {:.4}", curve.estimate(0.1), curve.iid_floor);
    Ok(())
}
