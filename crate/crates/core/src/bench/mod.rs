//! Experiment harness: dataset ingestion, recognition and timing sweeps,
//! CSV reports.
//!
//! At this boundary samples are rows. Solvers receive the centered training
//! samples directly, so the solver's columns `a_i` are the features and the
//! loadings `z` live in feature space, like PCA components.

pub mod dataset;
pub mod knn;
pub mod recognition;
pub mod report;
pub mod synth;
pub mod timing;

use std::fmt;
use std::str::FromStr;

use crate::config::{Init, Penalty, Variant};
use crate::error::{Result, SpcaError};
use crate::matrix::{column_norms, DataMatrix};

pub use dataset::{
    load_dataset, load_matrix_csv, make_splits, parse_split_policy, DatasetFormat, LabeledDataset, Split,
    SplitPolicy,
};
pub use knn::{knn_classify, per_class_accuracy, KnnResult};
pub use recognition::{run_recognition_experiment, ExperimentConfig, RecognitionOutcome};
pub use report::{emit_report, Field, Table};
pub use synth::{sparse_factor_dataset, SparseFactorSpec};
pub use timing::{run_timing_experiment, TimingConfig};

/// A dimensionality-reduction method under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Pca,
    Spca(Variant),
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Pca => "pca",
            Method::Spca(v) => v.name(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = SpcaError;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("pca") {
            Ok(Method::Pca)
        } else {
            s.parse().map(Method::Spca)
        }
    }
}

/// How configured γ values are turned into solver thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaScale {
    /// Passed to the solver unchanged.
    #[default]
    Absolute,
    /// A fraction of the largest threshold that still leaves a nonzero
    /// component: `ρ·μ·max‖a_i‖` for l1, `ρ·(μ·max‖a_i‖)²` for l0.
    Relative,
}

impl FromStr for GammaScale {
    type Err = SpcaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "absolute" => Ok(GammaScale::Absolute),
            "relative" => Ok(GammaScale::Relative),
            other => Err(SpcaError::InvalidConfig(format!(
                "gamma scale must be absolute or relative, got `{other}`"
            ))),
        }
    }
}

/// Per-component solver thresholds for `a`. `gamma` and `mu` hold one value
/// or one per component.
pub fn effective_gamma(
    a: &DataMatrix,
    penalty: Penalty,
    m: usize,
    gamma: &[f64],
    mu: &[f64],
    scale: GammaScale,
) -> Result<Vec<f64>> {
    let pick = |values: &[f64], j: usize, name: &str| -> Result<f64> {
        match values.len() {
            1 => Ok(values[0]),
            len if len == m => Ok(values[j]),
            len => Err(SpcaError::InvalidConfig(format!(
                "{name} needs 1 or {m} entries, got {len}"
            ))),
        }
    };
    let max_norm = column_norms(a).into_iter().fold(0.0, f64::max);
    (0..m)
        .map(|j| {
            let g = pick(gamma, j, "gamma")?;
            let u = pick(mu, j, "mu")?;
            Ok(match (scale, penalty) {
                (GammaScale::Absolute, _) => g,
                (GammaScale::Relative, Penalty::L1) => g * u * max_norm,
                (GammaScale::Relative, Penalty::L0) => g * (u * max_norm).powi(2),
            })
        })
        .collect()
}

/// Starting point used for block solves inside the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlockStart {
    /// The `m` largest-norm columns, orthonormalized. Every component starts
    /// with at least one active column whenever `γ_j < μ_j·max‖a_i‖`.
    #[default]
    MaxNormColumn,
    /// Seeded random orthonormal start.
    Random,
}

impl BlockStart {
    pub fn resolve(self, seed: u64) -> Init {
        match self {
            BlockStart::MaxNormColumn => Init::MaxNormColumn,
            BlockStart::Random => Init::RandomOrthonormal { seed },
        }
    }
}

impl FromStr for BlockStart {
    type Err = SpcaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max-norm-column" => Ok(BlockStart::MaxNormColumn),
            "random" => Ok(BlockStart::Random),
            other => Err(SpcaError::InvalidConfig(format!(
                "block start must be max-norm-column or random, got `{other}`"
            ))),
        }
    }
}

/// Renders a γ list: one float, or `;`-joined floats.
pub(crate) fn gamma_field(gamma: &[f64]) -> Field {
    match gamma {
        [g] => Field::Float(*g),
        many => Field::Text(
            many.iter()
                .map(|g| format!("{g:.16e}"))
                .collect::<Vec<_>>()
                .join(";"),
        ),
    }
}
