//! Median solve times on random instances with P = N / 10.
//!
//! `cargo run --release --example timing`

use spca::bench::{run_timing_experiment, TimingConfig};

fn main() -> spca::Result<()> {
    let config = TimingConfig {
        sizes: vec![200, 400],
        instances: 5,
        ..Default::default()
    };
    let outcome = run_timing_experiment(&config)?;
    let csv = outcome.table.to_csv_string()?;
    for line in csv
        .lines()
        .filter(|l| l.contains("median") || l.starts_with("variant"))
    {
        println!("{line}");
    }
    Ok(())
}
