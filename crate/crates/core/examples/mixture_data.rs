//! Draw clean and contaminated datasets from `½N(θ₀, I) + ½N(−θ₀, I)`.
//!
//! `cargo run --example mixture_data`

use rmrw::mixture::{sample_data, ContaminationSpec, MixtureSpec, Noise};

fn main() -> rmrw::Result<()> {
    let spec = MixtureSpec::along_first_axis(2, 2.0)?;
    println!("density at θ₀: {:.6}", spec.density(spec.theta0())?);
    println!("density at 0:  {:.6}", spec.density(&[0.0, 0.0])?);

    let clean = sample_data(&spec, None, 1000, 7)?;
    let positive = clean.rows().filter(|x| x[0] > 0.0).count();
    println!("clean: {} points, {positive} with x₁ > 0", clean.len());

    // Same seed, so the contaminated set replaces a subset of the clean points.
    let noise = ContaminationSpec::new(0.1, Noise::PointMass { at: vec![0.0, 8.0] }, 1.0)?;
    let dirty = sample_data(&spec, Some(&noise), 1000, 7)?;
    let replaced = clean.rows().zip(dirty.rows()).filter(|(a, b)| a != b).count();
    println!("γ = 0.1: {replaced} points moved to the point mass");
    Ok(())
}
