//! Recognition sweeps: fit a projection on training rows, embed train and
//! test rows, classify test rows by nearest neighbor.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DMatrix;

use crate::bench::dataset::{make_splits, LabeledDataset, SplitPolicy};
use crate::bench::knn::{knn_classify, per_class_accuracy};
use crate::bench::report::{emit_report, join_counts, Field, Table};
use crate::bench::{effective_gamma, gamma_field, BlockStart, GammaScale, Method};
use crate::config::{Mode, SolverConfig};
use crate::error::{Result, SpcaError};
use crate::matrix::center_columns_with_mean;
use crate::parallel::KernelPlan;
use crate::pca::{pca_fit, project};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub methods: Vec<Method>,
    /// Subspace dimensions to sweep.
    pub m_values: Vec<usize>,
    /// One value or one per component.
    pub gamma: Vec<f64>,
    pub gamma_scale: GammaScale,
    pub mu: Vec<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub split: SplitPolicy,
    pub repetitions: usize,
    /// Fixes splits (repetition `r` uses `seed + r`) and solver starts.
    pub seed: u64,
    pub neighbors: usize,
    pub block_init: BlockStart,
    pub plan: KernelPlan,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            methods: vec![Method::Pca],
            m_values: vec![5],
            gamma: vec![0.1],
            gamma_scale: GammaScale::Absolute,
            mu: vec![1.0],
            tol: SolverConfig::DEFAULT_TOL,
            max_iter: SolverConfig::DEFAULT_MAX_ITER,
            split: SplitPolicy::AsLoaded,
            repetitions: 1,
            seed: 0,
            neighbors: 1,
            block_init: BlockStart::default(),
            plan: KernelPlan::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(SpcaError::InvalidConfig(msg.into()));
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1");
        }
        if self.methods.is_empty() || self.m_values.is_empty() {
            return bad("need at least one method and one m");
        }
        if self.m_values.contains(&0) {
            return bad("m must be at least 1");
        }
        if self.neighbors == 0 {
            return bad("neighbors must be at least 1");
        }
        Ok(())
    }
}

/// Result of one (method, m, repetition) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub accuracy: f64,
    pub per_class: BTreeMap<i64, f64>,
    pub nnz_per_component: Vec<usize>,
    pub fit_seconds: f64,
    /// Test-row predictions in split order.
    pub predictions: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecognitionRecord {
    pub method: Method,
    pub m: usize,
    pub repetition: usize,
    /// Failures are kept as messages so one bad cell does not end the sweep.
    pub outcome: std::result::Result<CellResult, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecognitionOutcome {
    pub records: Vec<RecognitionRecord>,
    /// Accuracies, one row per cell, then one mean row per (method, m).
    pub table: Table,
    /// Wall-clock fit times, kept apart so `table` is reproducible.
    pub timings: Table,
}

impl RecognitionOutcome {
    /// Mean accuracy over successful repetitions.
    pub fn mean_accuracy(&self, method: Method, m: usize) -> Option<f64> {
        let hits: Vec<f64> = self
            .records
            .iter()
            .filter(|r| r.method == method && r.m == m)
            .filter_map(|r| r.outcome.as_ref().ok().map(|c| c.accuracy))
            .collect();
        (!hits.is_empty()).then(|| hits.iter().sum::<f64>() / hits.len() as f64)
    }

    /// Writes `table` to `path` and the timings next to it as
    /// `<stem>.timings.csv`.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<PathBuf> {
        let path = path.as_ref();
        emit_report(&self.table, path)?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
        let sidecar = path.with_file_name(format!("{stem}.timings.csv"));
        emit_report(&self.timings, &sidecar)?;
        Ok(sidecar)
    }
}

fn fit_loadings(
    train: &LabeledDataset,
    method: Method,
    m: usize,
    config: &ExperimentConfig,
    repetition: usize,
) -> Result<(DMatrix<f64>, nalgebra::DVector<f64>, Vec<usize>)> {
    let samples = train.train_matrix()?;
    match method {
        Method::Pca => {
            let model = pca_fit(&samples, m)?;
            let nnz = model
                .components
                .column_iter()
                .map(|c| c.iter().filter(|v| **v != 0.0).count())
                .collect();
            Ok((model.components, model.mean, nnz))
        }
        Method::Spca(variant) => {
            let (centered, mean) = center_columns_with_mean(&samples);
            let gamma = effective_gamma(
                &centered,
                variant.penalty(),
                m,
                &config.gamma,
                &config.mu,
                config.gamma_scale,
            )?;
            let mut solver = SolverConfig::for_variant(variant, m, 0.0)
                .with_gamma(gamma)
                .with_mu(config.mu.clone())
                .with_tol(config.tol)
                .with_max_iter(config.max_iter)
                .with_plan(config.plan);
            if variant.mode() == Mode::Block {
                solver = solver.with_init(
                    config
                        .block_init
                        .resolve(config.seed.wrapping_add(repetition as u64)),
                );
            }
            let (mut z, report) = crate::solve(&centered, &solver)?;
            z.canonicalize_signs();
            Ok((z.values().clone(), mean, report.nnz_per_component))
        }
    }
}

fn run_cell(
    dataset: &LabeledDataset,
    method: Method,
    m: usize,
    config: &ExperimentConfig,
    repetition: usize,
) -> Result<CellResult> {
    let start = Instant::now();
    let (loadings, mean, nnz_per_component) = fit_loadings(dataset, method, m, config, repetition)?;
    let fit_seconds = start.elapsed().as_secs_f64();
    let split = &dataset.split;
    let train_emb = project(&dataset.rows(&split.train), &loadings, &mean)?;
    let test_emb = project(&dataset.rows(&split.test), &loadings, &mean)?;
    let truth = dataset.labels_of(&split.test);
    let knn = knn_classify(
        &train_emb,
        &dataset.labels_of(&split.train),
        &test_emb,
        Some(&truth),
        config.neighbors,
    )?;
    Ok(CellResult {
        accuracy: knn.accuracy,
        per_class: per_class_accuracy(&knn.predictions, &truth),
        nnz_per_component,
        fit_seconds,
        predictions: knn.predictions,
    })
}

fn mean_of(values: impl Iterator<Item = f64>) -> f64 {
    let kept: Vec<f64> = values.filter(|v| v.is_finite()).collect();
    if kept.is_empty() {
        f64::NAN
    } else {
        kept.iter().sum::<f64>() / kept.len() as f64
    }
}

/// Runs every (repetition, method, m) cell on `dataset`.
pub fn run_recognition_experiment(
    dataset: &LabeledDataset,
    config: &ExperimentConfig,
) -> Result<RecognitionOutcome> {
    config.validate()?;
    let classes = dataset.classes();
    let mut records = Vec::new();
    for repetition in 0..config.repetitions {
        let split = make_splits(
            dataset,
            &config.split,
            config.seed.wrapping_add(repetition as u64),
        )?;
        if split.split.test.is_empty() || split.split.train.is_empty() {
            return Err(SpcaError::InvalidConfig(
                "recognition needs nonempty train and test rows".into(),
            ));
        }
        for &method in &config.methods {
            for &m in &config.m_values {
                let outcome = run_cell(&split, method, m, config, repetition).map_err(|e| e.to_string());
                records.push(RecognitionRecord {
                    method,
                    m,
                    repetition,
                    outcome,
                });
            }
        }
    }

    let mut header: Vec<String> = ["method", "m", "gamma", "repetition", "status", "overall_accuracy"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(classes.iter().map(|c| format!("acc_class_{c}")));
    header.push("nnz_per_component".into());
    let mut table = Table::new(header);
    let mut timings = Table::new(["method", "m", "gamma", "repetition", "fit_seconds"]);

    let gamma_of = |method: Method| match method {
        Method::Pca => Field::Float(0.0),
        Method::Spca(_) => gamma_field(&config.gamma),
    };
    for r in &records {
        let mut row = vec![
            r.method.name().into(),
            r.m.into(),
            gamma_of(r.method),
            r.repetition.into(),
        ];
        match &r.outcome {
            Ok(cell) => {
                row.push("ok".into());
                row.push(cell.accuracy.into());
                row.extend(
                    classes
                        .iter()
                        .map(|c| Field::Float(cell.per_class.get(c).copied().unwrap_or(f64::NAN))),
                );
                row.push(join_counts(&cell.nnz_per_component));
                timings.push(vec![
                    r.method.name().into(),
                    r.m.into(),
                    gamma_of(r.method),
                    r.repetition.into(),
                    cell.fit_seconds.into(),
                ]);
            }
            Err(message) => {
                row.push(format!("error: {message}").into());
                row.push(f64::NAN.into());
                row.extend(classes.iter().map(|_| Field::Float(f64::NAN)));
                row.push("".into());
            }
        }
        table.push(row);
    }

    for &method in &config.methods {
        for &m in &config.m_values {
            let ok: Vec<&CellResult> = records
                .iter()
                .filter(|r| r.method == method && r.m == m)
                .filter_map(|r| r.outcome.as_ref().ok())
                .collect();
            let mut row = vec![method.name().into(), m.into(), gamma_of(method), "mean".into()];
            row.push(format!("ok {}/{}", ok.len(), config.repetitions).into());
            row.push(mean_of(ok.iter().map(|c| c.accuracy)).into());
            for c in &classes {
                row.push(
                    mean_of(
                        ok.iter()
                            .map(|cell| cell.per_class.get(c).copied().unwrap_or(f64::NAN)),
                    )
                    .into(),
                );
            }
            let nnz_means: Vec<String> = (0..m)
                .map(|j| {
                    format!(
                        "{:.16e}",
                        mean_of(ok.iter().map(|c| c.nnz_per_component[j] as f64))
                    )
                })
                .collect();
            row.push(if ok.is_empty() {
                "".into()
            } else {
                nnz_means.join(";").into()
            });
            table.push(row);
        }
    }

    Ok(RecognitionOutcome {
        records,
        table,
        timings,
    })
}
