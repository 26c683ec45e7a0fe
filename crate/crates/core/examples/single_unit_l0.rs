//! One sparse component with the L0 penalty, and several components by
//! deflation.
//!
//! `cargo run --example single_unit_l0`

use spca::{solve, DataMatrix, Penalty, SolverConfig};

fn main() -> spca::Result<()> {
    let a = DataMatrix::from_rows(&[
        vec![4.0, 3.9, 0.1, 0.0, 0.2, -0.1],
        vec![-4.1, -4.0, 0.0, 0.1, -0.2, 0.1],
        vec![0.1, 0.0, 3.0, 2.9, 0.1, 0.0],
        vec![0.0, -0.1, -3.1, -3.0, 0.0, 0.2],
        vec![0.3, 0.2, 0.1, -0.2, 0.5, 0.4],
    ])?;

    let config = SolverConfig::single_unit(Penalty::L0, 1.0).with_m(2);
    let (z, report) = solve(&a, &config)?;
    for j in 0..z.m() {
        println!("component {j}: support {:?}", z.support(j));
    }
    println!(
        "nnz per component {:?}, converged {}",
        report.nnz_per_component, report.converged
    );
    Ok(())
}
