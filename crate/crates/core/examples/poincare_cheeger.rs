//! Discrete Poincaré and Cheeger constants: analytic cases, a bimodal
//! density, and the two-dimensional combination bound.
//!
//! `cargo run --release --example poincare_cheeger`

use rmrw::grid::{Axis, Grid};
use rmrw::theory::{cheeger_constant, combination_constants, poincare_constant, GridDensity};

fn line(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> rmrw::Result<GridDensity> {
    GridDensity::from_log_density(Grid::line(Axis::new(lo, hi, 2000)?), |x| f(x[0]))
}

fn main() -> rmrw::Result<()> {
    let gauss = line(-6.0, 6.0, |x| -0.5 * x * x)?;
    let unif = line(0.0, 1.0, |_| 0.0)?;
    println!("N(0,1):     C = {:.5} (exact 1)", poincare_constant(&gauss)?);
    println!("U[0,1]:     C = {:.5} (exact 1/π² = {:.5})", poincare_constant(&unif)?, 1.0 / std::f64::consts::PI.powi(2));

    for sep in [0.0, 1.0, 2.0, 3.0] {
        let g = line(-9.0, 9.0, |x| {
            let (u, v) = (-0.5 * (x - sep).powi(2), -0.5 * (x + sep).powi(2));
            u.max(v) + (-(u - v).abs()).exp().ln_1p()
        })?;
        let c = poincare_constant(&g)?;
        let z = cheeger_constant(&g)?.value;
        println!("modes ±{sep}: C = {c:>9.3}  ζ = {z:.4}  4/ζ² = {:>9.3}", 4.0 / (z * z));
    }

    let ax = Axis::symmetric(5.0, 40)?;
    let g = GridDensity::from_log_density(Grid::plane(ax, ax), |x| {
        -0.5 * (x[0] * x[0] + x[0] * x[1] + x[1] * x[1])
    })?;
    let k = combination_constants(&g)?;
    println!(
        "2-D: C₁ = {:.3}, C₂ = {:.3}, L = {:.3}, C = {:.3} ≤ {:.3}",
        k.c1,
        k.c2,
        k.l,
        k.c_joint,
        k.bound()
    );
    Ok(())
}
