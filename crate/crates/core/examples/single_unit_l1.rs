//! One sparse component with the L1 penalty, swept over gamma.
//!
//! `cargo run --example single_unit_l1`

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use spca::{center_columns, solve_single_unit, DataMatrix, Penalty, SolverConfig};

fn main() -> spca::Result<()> {
    // 50 samples of 30 features; features 0..5 share a common factor.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let factor: Vec<f64> = (0..50).map(|_| StandardNormal.sample(&mut rng)).collect();
    let raw = DMatrix::from_fn(50, 30, |i, j| {
        let noise: f64 = StandardNormal.sample(&mut rng);
        if j < 5 {
            3.0 * factor[i] + 0.3 * noise
        } else {
            noise
        }
    });
    let a = center_columns(&DataMatrix::new(raw)?);

    for gamma in [0.0, 2.0, 8.0, 12.0] {
        let (z, report) = solve_single_unit(&a, &SolverConfig::single_unit(Penalty::L1, gamma))?;
        println!(
            "gamma {gamma:>5}: support {:?}, objective {:.4}, {} iterations",
            z.support(0),
            report.final_objective(),
            report.iterations
        );
    }
    Ok(())
}
