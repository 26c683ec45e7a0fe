//! Wall-clock sweeps over random Gaussian instances `A` of size `P x N`
//! with `P = N / 10`.

use std::time::Instant;

use crate::bench::report::{Field, Table};
use crate::bench::synth::gaussian_matrix;
use crate::bench::{effective_gamma, BlockStart, GammaScale};
use crate::config::{Mode, SolverConfig, Variant};
use crate::error::{Result, SpcaError};
use crate::matrix::DataMatrix;
use crate::parallel::{median, KernelPlan, DEFAULT_CHUNK};

pub const SAMPLE_RATIO: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct TimingConfig {
    /// Values of `N`; each must be a positive multiple of 10.
    pub sizes: Vec<usize>,
    pub instances: usize,
    pub gammas: Vec<f64>,
    pub gamma_scale: GammaScale,
    pub m: usize,
    pub variants: Vec<Variant>,
    pub workers: Vec<usize>,
    pub chunk: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
    pub block_init: BlockStart,
    /// Sizes whose matrix would exceed this many bytes are skipped.
    pub max_bytes: usize,
}

impl Default for TimingConfig {
    fn default() -> Self {
        Self {
            sizes: vec![500, 1000, 2000],
            instances: 20,
            gammas: vec![0.01, 0.05],
            gamma_scale: GammaScale::Relative,
            m: 5,
            variants: Variant::ALL.to_vec(),
            workers: vec![1],
            chunk: DEFAULT_CHUNK,
            seed: 0,
            tol: SolverConfig::DEFAULT_TOL,
            max_iter: SolverConfig::DEFAULT_MAX_ITER,
            block_init: BlockStart::default(),
            max_bytes: 4 << 30,
        }
    }
}

pub const TIMING_HEADER: [&str; 9] = [
    "variant",
    "N",
    "P",
    "gamma",
    "workers",
    "instance",
    "seconds",
    "iterations",
    "status",
];

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRecord {
    pub variant: Variant,
    pub n: usize,
    pub p: usize,
    pub gamma: f64,
    pub workers: usize,
    pub instance: usize,
    pub seconds: f64,
    pub iterations: usize,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingOutcome {
    pub records: Vec<TimingRecord>,
    /// One row per solve, then one median row per (variant, N, gamma, workers).
    pub table: Table,
}

fn instance_seed(seed: u64, n: usize, instance: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((n as u64) << 20)
        .wrapping_add(instance as u64)
}

impl TimingConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SpcaError::InvalidConfig(msg));
        if let Some(n) = self.sizes.iter().find(|&&n| n == 0 || n % SAMPLE_RATIO != 0) {
            return bad(format!(
                "N must be a positive multiple of {SAMPLE_RATIO}, got {n}"
            ));
        }
        if self.instances == 0
            || self.variants.is_empty()
            || self.gammas.is_empty()
            || self.workers.is_empty()
        {
            return bad("timing needs instances, variants, gammas and worker counts".into());
        }
        if self.m == 0 || self.sizes.iter().any(|&n| self.m > n / SAMPLE_RATIO) {
            return bad(format!(
                "m = {} must be in 1..=N/{SAMPLE_RATIO} for every size",
                self.m
            ));
        }
        if let Some(g) = self.gammas.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return bad(format!("gamma must be finite and >= 0, got {g}"));
        }
        for &w in &self.workers {
            KernelPlan::new(w, self.chunk)?;
        }
        Ok(())
    }
}

/// Times every (size, instance, variant, gamma, worker count) solve.
pub fn run_timing_experiment(config: &TimingConfig) -> Result<TimingOutcome> {
    config.validate()?;
    let mut records = Vec::new();
    for &n in &config.sizes {
        let p = n / SAMPLE_RATIO;
        let bytes = p.saturating_mul(n).saturating_mul(std::mem::size_of::<f64>());
        if bytes > config.max_bytes {
            for &variant in &config.variants {
                for &gamma in &config.gammas {
                    for &workers in &config.workers {
                        records.push(TimingRecord {
                            variant,
                            n,
                            p,
                            gamma,
                            workers,
                            instance: usize::MAX,
                            seconds: f64::NAN,
                            iterations: 0,
                            status: format!("skipped: {bytes} bytes exceeds limit {}", config.max_bytes),
                        });
                    }
                }
            }
            continue;
        }
        for instance in 0..config.instances {
            let seed = instance_seed(config.seed, n, instance);
            let a = DataMatrix::new(gaussian_matrix(p, n, seed))?;
            for &variant in &config.variants {
                for &gamma in &config.gammas {
                    let thresholds = effective_gamma(
                        &a,
                        variant.penalty(),
                        config.m,
                        &[gamma],
                        &[1.0],
                        config.gamma_scale,
                    )?;
                    for &workers in &config.workers {
                        let mut solver = SolverConfig::for_variant(variant, config.m, 0.0)
                            .with_gamma(thresholds.clone())
                            .with_tol(config.tol)
                            .with_max_iter(config.max_iter)
                            .with_plan(KernelPlan::new(workers, config.chunk)?);
                        if variant.mode() == Mode::Block {
                            solver = solver.with_init(config.block_init.resolve(seed));
                        }
                        let start = Instant::now();
                        let result = crate::solve(&a, &solver);
                        let seconds = start.elapsed().as_secs_f64();
                        let (iterations, status) = match result {
                            Ok((_, report)) => (report.iterations, "ok".to_string()),
                            Err(e) => (0, format!("error: {e}")),
                        };
                        records.push(TimingRecord {
                            variant,
                            n,
                            p,
                            gamma,
                            workers,
                            instance,
                            seconds,
                            iterations,
                            status,
                        });
                    }
                }
            }
        }
    }

    let mut table = Table::new(TIMING_HEADER);
    for r in &records {
        let instance = if r.instance == usize::MAX {
            Field::Text("all".into())
        } else {
            r.instance.into()
        };
        table.push(vec![
            r.variant.name().into(),
            r.n.into(),
            r.p.into(),
            r.gamma.into(),
            r.workers.into(),
            instance,
            r.seconds.into(),
            r.iterations.into(),
            r.status.clone().into(),
        ]);
    }
    for &n in &config.sizes {
        for &variant in &config.variants {
            for &gamma in &config.gammas {
                for &workers in &config.workers {
                    let ok: Vec<&TimingRecord> = records
                        .iter()
                        .filter(|r| {
                            r.n == n
                                && r.variant == variant
                                && r.gamma == gamma
                                && r.workers == workers
                                && r.status == "ok"
                        })
                        .collect();
                    let mut seconds: Vec<f64> = ok.iter().map(|r| r.seconds).collect();
                    let mut iterations: Vec<f64> = ok.iter().map(|r| r.iterations as f64).collect();
                    table.push(vec![
                        variant.name().into(),
                        n.into(),
                        (n / SAMPLE_RATIO).into(),
                        gamma.into(),
                        workers.into(),
                        "median".into(),
                        median(&mut seconds).into(),
                        median(&mut iterations).into(),
                        format!("ok {}/{}", ok.len(), config.instances).into(),
                    ]);
                }
            }
        }
    }
    Ok(TimingOutcome { records, table })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> TimingConfig {
        TimingConfig {
            sizes: vec![60, 100],
            instances: 3,
            m: 2,
            ..Default::default()
        }
    }

    #[test]
    fn grid_and_gamma_column() {
        let out = run_timing_experiment(&tiny()).unwrap();
        assert_eq!(out.records.len(), 2 * 3 * 4 * 2);
        for r in &out.records {
            assert_eq!(r.p * SAMPLE_RATIO, r.n);
            assert!([0.01, 0.05].contains(&r.gamma));
            assert_eq!(r.status, "ok");
        }
        assert_eq!(out.table.rows.len(), 48 + 2 * 4 * 2);
        assert_eq!(out.table.header, TIMING_HEADER);
    }

    #[test]
    fn iteration_counts_are_reproducible() {
        let a = run_timing_experiment(&tiny()).unwrap();
        let b = run_timing_experiment(&tiny()).unwrap();
        let iters = |o: &TimingOutcome| o.records.iter().map(|r| r.iterations).collect::<Vec<_>>();
        assert_eq!(iters(&a), iters(&b));
    }

    #[test]
    fn oversized_grid_points_are_skipped() {
        let cfg = TimingConfig {
            max_bytes: 60 * 6 * 8,
            ..tiny()
        };
        let out = run_timing_experiment(&cfg).unwrap();
        assert!(out
            .records
            .iter()
            .filter(|r| r.n == 100)
            .all(|r| r.status.starts_with("skipped")));
        assert!(out.records.iter().filter(|r| r.n == 60).all(|r| r.status == "ok"));
    }

    #[test]
    fn invalid_grid() {
        assert!(run_timing_experiment(&TimingConfig {
            sizes: vec![55],
            ..tiny()
        })
        .is_err());
        assert!(run_timing_experiment(&TimingConfig { m: 7, ..tiny() }).is_err());
    }
}
