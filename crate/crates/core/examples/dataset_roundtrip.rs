//! Write a dataset and a chain trace as CSV, read them back, and sample on
//! the stored data through the `sample` driver.
//!
//! `cargo run --release --example dataset_roundtrip`

use rmrw::experiments::{run_generate_data, run_sample, GenerateConfig, SampleConfig};
use rmrw::io::{read_dataset, read_trace};

fn main() -> rmrw::Result<()> {
    let dir = std::path::Path::new("out/roundtrip");
    let gen = run_generate_data(&GenerateConfig { n: 300, ..Default::default() }, &dir.join("data"))?;
    let data = read_dataset(&gen.artifact("data.csv"))?;
    println!("read {} points in d = {}", data.len(), data.dim());

    let cfg = SampleConfig {
        data: Some(gen.artifact("data.csv")),
        steps: 5_000,
        ..Default::default()
    };
    let run = run_sample(&cfg, &dir.join("sample"))?;
    let trace = read_trace(&run.artifact("trace.csv"))?;
    println!("trace: {} states, acceptance {:.3}", trace.len(), trace.acceptance_rate);
    println!("last state {:?}", trace.last());
    Ok(())
}
