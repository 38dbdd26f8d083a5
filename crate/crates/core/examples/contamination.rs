//! Histogram diagnostics under increasing Huber contamination, with the
//! threshold shape `c/(β(K²+1)(d+‖θ₀‖²)log(n/δ))` calibrated on the sweep.
//!
//! `cargo run --release --example contamination -- out/contamination`

use rmrw::experiments::{run_contamination, ContaminationConfig};

fn main() -> rmrw::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out/contamination".into());
    let cfg = ContaminationConfig {
        replications: 5,
        replication_pass_rate: 0.8,
        ..Default::default()
    };
    let outcome = run_contamination(&cfg, out.as_ref())?;
    println!("{}", serde_json::to_string_pretty(&outcome.summary)?);
    for a in &outcome.assertions {
        println!("{} {} {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
    Ok(())
}
