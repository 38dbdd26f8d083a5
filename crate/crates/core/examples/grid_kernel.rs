//! Exact transition matrices of RMRW and MRW on a one-dimensional grid:
//! stochasticity, reversibility, spectral gap and s-conductance.
//!
//! `cargo run --release --example grid_kernel`

use rmrw::diagnostics::{tail_radius, Level};
use rmrw::grid::Axis;
use rmrw::mixture::{sample_data, MixtureSpec};
use rmrw::potential::{PowerPosterior, PriorSpec};
use rmrw::sampler::{practical_step_size, Algorithm};
use rmrw::theory::build_grid_kernel;

fn main() -> rmrw::Result<()> {
    let beta = 50.0;
    let eta = practical_step_size(1, beta)?;
    println!("{:>3} {:>6} {:>10} {:>10} {:>10} {:>12}", "a", "kernel", "row err", "DB resid", "1 - |λ₂|", "Φ_0.1");
    for a in [0.0, 1.0, 2.0, 3.0] {
        let spec = MixtureSpec::along_first_axis(1, a)?;
        let data = sample_data(&spec, None, 50, 1)?;
        let pp = PowerPosterior::new(spec, data, beta, PriorSpec::UniformImproper)?;
        let half = tail_radius(1, a, beta, 1e-3)? + 0.5;
        let axis = Axis::symmetric(half, 2 * (100.0 * half).ceil() as usize)?;
        for alg in [Algorithm::Rmrw, Algorithm::Mrw] {
            let k = build_grid_kernel(&pp, Level::Empirical, eta, axis, alg)?;
            let phi = k.s_conductance(0.1)?.unwrap_or(0.0);
            println!(
                "{a:>3} {:>6} {:>10.2e} {:>10.2e} {:>10.2e} {:>12.4e}",
                format!("{alg:?}"),
                k.row_sum_error(),
                k.detailed_balance_residual(),
                1.0 - k.second_eigenvalue_modulus(),
                phi
            );
        }
    }
    Ok(())
}
