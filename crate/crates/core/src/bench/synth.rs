//! Seeded synthetic data.
//!
//! The sparse-factor generator plants class structure in a few sparse
//! directions of feature space and hides it under dense, higher-variance
//! nuisance directions that carry no label information.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bench::dataset::LabeledDataset;
use crate::error::{Result, SpcaError};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseFactorSpec {
    pub classes: usize,
    pub samples_per_class: usize,
    pub features: usize,
    /// Number of disjoint sparse latent directions.
    pub latent: usize,
    /// Nonzeros per latent direction.
    pub support: usize,
    /// Standard deviation of class means along each latent direction.
    pub class_spread: f64,
    /// Within-class standard deviation along each latent direction.
    pub within_class: f64,
    /// Dense nuisance directions and their standard deviation.
    pub nuisance: usize,
    pub nuisance_scale: f64,
    /// Isotropic Gaussian noise on every feature.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SparseFactorSpec {
    fn default() -> Self {
        Self {
            classes: 20,
            samples_per_class: 30,
            features: 200,
            latent: 5,
            support: 10,
            class_spread: 3.0,
            within_class: 0.5,
            nuisance: 3,
            nuisance_scale: 5.0,
            noise: 0.5,
            seed: 0,
        }
    }
}

/// Draws `classes * samples_per_class` samples, grouped by class. Labels
/// are `1..=classes`. The latent supports are disjoint random feature sets.
pub fn sparse_factor_dataset(spec: &SparseFactorSpec) -> Result<LabeledDataset> {
    if spec.latent * spec.support > spec.features {
        return Err(SpcaError::InvalidConfig(format!(
            "{} latent directions of {} nonzeros do not fit in {} features",
            spec.latent, spec.support, spec.features
        )));
    }
    if spec.classes == 0 || spec.samples_per_class == 0 || spec.support == 0 {
        return Err(SpcaError::InvalidConfig("empty synthetic dataset".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };

    let mut features: Vec<usize> = (0..spec.features).collect();
    let mut perm_rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x5eed);
    features.shuffle(&mut perm_rng);
    let weight = 1.0 / (spec.support as f64).sqrt();
    let latent_dirs: Vec<DVector<f64>> = (0..spec.latent)
        .map(|k| {
            let mut v = DVector::zeros(spec.features);
            for &f in &features[k * spec.support..(k + 1) * spec.support] {
                v[f] = weight;
            }
            v
        })
        .collect();
    let nuisance_dirs: Vec<DVector<f64>> = (0..spec.nuisance)
        .map(|_| {
            let v = DVector::from_fn(spec.features, |_, _| normal());
            let norm = v.norm();
            v / norm
        })
        .collect();
    let class_means: Vec<Vec<f64>> = (0..spec.classes)
        .map(|_| (0..spec.latent).map(|_| spec.class_spread * normal()).collect())
        .collect();

    let n = spec.classes * spec.samples_per_class;
    let mut samples = DMatrix::zeros(n, spec.features);
    let mut labels = Vec::with_capacity(n);
    for (c, mean) in class_means.iter().enumerate() {
        for s in 0..spec.samples_per_class {
            let row = c * spec.samples_per_class + s;
            let mut x = DVector::from_fn(spec.features, |_, _| spec.noise * normal());
            for (k, dir) in latent_dirs.iter().enumerate() {
                x.axpy(mean[k] + spec.within_class * normal(), dir, 1.0);
            }
            for dir in &nuisance_dirs {
                x.axpy(spec.nuisance_scale * normal(), dir, 1.0);
            }
            samples.set_row(row, &x.transpose());
            labels.push(c as i64 + 1);
        }
    }
    LabeledDataset::new(samples, labels)
}

/// `p x n` matrix of independent standard normal entries.
pub fn gaussian_matrix(p: usize, n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(p, n, |_, _| StandardNormal.sample(&mut rng))
}
