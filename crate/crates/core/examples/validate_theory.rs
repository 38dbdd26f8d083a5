//! Runs lemma suites and prints the summary table. Pass suite names as
//! arguments (default: `poincare isoperimetry tails`).
//!
//! `cargo run --release --example validate_theory -- kernel structure`

use rmrw::experiments::{run_validate_theory, Suite, ValidateConfig};
use rmrw::io::read_csv;

fn main() -> rmrw::Result<()> {
    let mut names: Vec<String> = std::env::args().skip(1).collect();
    if names.is_empty() {
        names = vec!["poincare".into(), "isoperimetry".into(), "tails".into()];
    }
    let cfg = ValidateConfig {
        suites: Suite::parse_list(&names.join(","))?,
        ..Default::default()
    };
    let outcome = run_validate_theory(&cfg, "out/validate".as_ref())?;
    let (_, table) = read_csv(&outcome.artifact("summary.csv"))?;
    for row in &table.rows {
        println!("{:<14} {:<44} {:>8} {:>24} {}", row[0], row[1], row[2], row[4], row[6]);
    }
    println!("passed: {}", outcome.passed);
    Ok(())
}
