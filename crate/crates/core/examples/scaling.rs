//! Across-chain mixing times over `d ∈ {1, 2}`, `a ∈ {0, …, 3}` and the
//! log-log slope against `d + a²`. Fewer chains than the experiment default.
//!
//! `cargo run --release --example scaling -- out/scaling`

use rmrw::experiments::{run_scaling, ScalingConfig};
use rmrw::io::read_csv;

fn main() -> rmrw::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out/scaling".into());
    let cfg = ScalingConfig {
        chains: 500,
        steps: 20_000,
        single_chain_tv_max: 0.1,
        ..Default::default()
    };
    let outcome = run_scaling(&cfg, out.as_ref())?;
    let (_, table) = read_csv(&outcome.artifact("table.csv"))?;
    println!("{}", table.header.join("\t"));
    for row in &table.rows {
        println!("{}", row.join("\t"));
    }
    println!("slope {}", outcome.summary["slope"]);
    Ok(())
}
