//! The column kernels give bit-identical results for any worker count.
//!
//! `cargo run --release --example parallel_kernels`

use spca::bench::synth::gaussian_matrix;
use spca::parallel::{measure_scaling, par_threshold_accumulate, KernelId, ScalingOptions};
use spca::{DataMatrix, KernelPlan, Penalty};

fn main() -> spca::Result<()> {
    let a = DataMatrix::new(gaussian_matrix(64, 20_000, 5))?;
    let corr: Vec<f64> = (0..a.n()).map(|i| a.column(i)[0]).collect();
    let reference = par_threshold_accumulate(&a, &corr, 0.5, Penalty::L1, &KernelPlan::sequential())?;
    for workers in [2, 4, 8] {
        let got = par_threshold_accumulate(&a, &corr, 0.5, Penalty::L1, &KernelPlan::new(workers, 256)?)?;
        println!("{workers} workers identical: {}", got == reference);
    }

    let cores = std::thread::available_parallelism().map_or(1, usize::from);
    let options = ScalingOptions {
        instances: 3,
        ..Default::default()
    };
    let table = measure_scaling(
        KernelId::ThresholdAccumulate,
        &[(200, 4000)],
        &[1, cores],
        &options,
    )?;
    for row in table.rows {
        println!(
            "P {} N {} workers {}: {:.2e}s, speedup {:.2}",
            row.p, row.n, row.workers, row.median_seconds, row.speedup
        );
    }
    Ok(())
}
