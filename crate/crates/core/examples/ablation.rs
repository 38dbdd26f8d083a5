//! Running mode balance of RMRW and MRW started in one mode.
//!
//! `cargo run --release --example ablation -- out/ablation`

use rmrw::experiments::{run_ablation, AblationConfig};

fn main() -> rmrw::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out/ablation".into());
    let outcome = run_ablation(&AblationConfig::default(), out.as_ref())?;
    println!("{}", serde_json::to_string_pretty(&outcome.summary)?);
    println!("passed: {}", outcome.passed);
    Ok(())
}
