//! Projected histograms of 10⁵ RMRW iterates at `a = 0` and `a = 5`
//! (`d = 10`, `n = 100`, `β = 8`). Artifacts go to the first argument.
//!
//! `cargo run --release --example figure1 -- out/figure1`

use rmrw::experiments::{run_figure1, Figure1Config};

fn main() -> rmrw::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out/figure1".into());
    let outcome = run_figure1(&Figure1Config::default(), out.as_ref())?;
    for a in &outcome.assertions {
        println!("{} {} {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
    println!("artifacts in {out}, manifest {}", outcome.manifest_hash);
    Ok(())
}
