//! Empirical and population potentials along the `e₁` axis, with the
//! population gradient and the smallest Hessian eigenvalue.
//!
//! `cargo run --example potential_landscape`

use nalgebra::SymmetricEigen;
use rmrw::mixture::{sample_data, MixtureSpec};
use rmrw::potential::{DissipativityBound, PowerPosterior, PriorSpec};

fn main() -> rmrw::Result<()> {
    let (a, beta) = (2.0, 4.0);
    let spec = MixtureSpec::along_first_axis(2, a)?;
    let data = sample_data(&spec, None, 500, 3)?;
    let pp = PowerPosterior::new(spec, data, beta, PriorSpec::UniformImproper)?;

    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}", "t", "U", "U0", "dU0/dt", "min eig", "dissip");
    for k in -8..=8 {
        let t = 0.5 * k as f64;
        let theta = [t, 0.0];
        let g = pp.population_gradient(&theta)?;
        let h = pp.population_hessian(&theta)?;
        let min_eig = SymmetricEigen::new(h).eigenvalues.min();
        println!(
            "{t:>6.2} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            pp.empirical_potential(&theta)?,
            pp.population_potential(&theta)?,
            g[0],
            min_eig,
            pp.dissipativity_margin(&theta, DissipativityBound::Population)?,
        );
    }
    // U is even, so ±θ₀ are both minima and min eig ≥ −β‖θ₀‖² everywhere.
    println!("curvature floor −β‖θ₀‖² = {}", -beta * a * a);
    Ok(())
}
