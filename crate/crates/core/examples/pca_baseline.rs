//! Dense PCA and how much variance sparse loadings give up.
//!
//! `cargo run --example pca_baseline`

use spca::bench::synth::gaussian_matrix;
use spca::pca::{explained_variance, pca_fit};
use spca::{center_columns, solve, DataMatrix, SolverConfig, Variant};

fn main() -> spca::Result<()> {
    let samples = DataMatrix::new(gaussian_matrix(200, 25, 3))?;
    let model = pca_fit(&samples, 3)?;
    println!("pca explained variance {:?}", model.explained_variance());

    let a = center_columns(&samples);
    let (z, _) = solve(&a, &SolverConfig::for_variant(Variant::Sl0, 3, 3.0))?;
    println!("sl0 nnz {:?}", z.nnz_per_component());
    println!(
        "sl0 explained variance {:?}",
        explained_variance(&samples, z.values())?
    );
    Ok(())
}
