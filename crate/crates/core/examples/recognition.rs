//! Nearest-neighbor recognition on sparse versus dense embeddings, using the
//! seeded synthetic dataset.
//!
//! `cargo run --release --example recognition`

use spca::bench::{
    run_recognition_experiment, sparse_factor_dataset, ExperimentConfig, GammaScale, Method,
    SparseFactorSpec, SplitPolicy,
};
use spca::Variant;

fn main() -> spca::Result<()> {
    let data = sparse_factor_dataset(&SparseFactorSpec::default())?;
    let methods = [
        Method::Pca,
        Method::Spca(Variant::Sl0),
        Method::Spca(Variant::Bl0),
    ];
    let config = ExperimentConfig {
        methods: methods.to_vec(),
        m_values: vec![2, 5],
        gamma: vec![0.1],
        gamma_scale: GammaScale::Relative,
        split: SplitPolicy::PerClassCount(10),
        repetitions: 3,
        ..Default::default()
    };
    let outcome = run_recognition_experiment(&data, &config)?;
    for m in [2, 5] {
        for method in methods {
            println!(
                "m {m} {method}: mean accuracy {:.3}",
                outcome.mean_accuracy(method, m).unwrap_or(f64::NAN)
            );
        }
    }
    let out = std::env::temp_dir().join("spca_recognition.csv");
    let sidecar = outcome.write(&out)?;
    println!("wrote {} and {}", out.display(), sidecar.display());
    Ok(())
}
