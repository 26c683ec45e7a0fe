//! Several components at once on the Stiefel manifold, with per-component
//! weights `mu`.
//!
//! `cargo run --example block`

use spca::bench::synth::gaussian_matrix;
use spca::{center_columns, solve, DataMatrix, Init, Penalty, SolverConfig};

fn main() -> spca::Result<()> {
    let a = center_columns(&DataMatrix::new(gaussian_matrix(40, 120, 7))?);
    for penalty in [Penalty::L1, Penalty::L0] {
        let gamma = match penalty {
            Penalty::L1 => 2.0,
            Penalty::L0 => 4.0,
        };
        let config = SolverConfig::block(penalty, 3, gamma)
            .with_mu(vec![1.0, 0.9, 0.8])
            .with_init(Init::MaxNormColumn);
        let (z, report) = solve(&a, &config)?;
        println!(
            "{penalty:?}: nnz {:?}, objective {:.3}, worst ||X'X - I|| {:.1e}",
            z.nnz_per_component(),
            report.final_objective(),
            report.feasibility.iter().copied().fold(0.0, f64::max)
        );
    }
    Ok(())
}
