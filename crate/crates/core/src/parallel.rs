//! Data-parallel column kernels with deterministic reductions.
//!
//! Every kernel splits the `n` columns of `A` into fixed chunks of
//! [`KernelPlan::chunk`] columns. Each chunk is processed sequentially into a
//! private partial result and the partials are merged by a pairwise tree whose
//! shape depends only on the number of chunks. The worker count only decides
//! which thread computes which chunk, so results are bitwise identical for any
//! number of workers.

use std::collections::HashMap;
use std::ops::Range;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::config::Penalty;
use crate::error::{check_len, Result, SpcaError};
use crate::matrix::{positive_part, sign, DataMatrix};

pub const DEFAULT_CHUNK: usize = 256;

/// Reduction strategy for partial accumulators. Only the deterministic
/// pairwise tree is provided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Reduction {
    #[default]
    PairwiseTree,
}

/// How a kernel is split across workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KernelPlan {
    pub workers: usize,
    pub chunk: usize,
    pub reduction: Reduction,
}

impl Default for KernelPlan {
    fn default() -> Self {
        Self::sequential()
    }
}

impl KernelPlan {
    pub fn new(workers: usize, chunk: usize) -> Result<Self> {
        if workers == 0 || chunk == 0 {
            return Err(SpcaError::InvalidConfig(format!(
                "workers and chunk must be positive (workers = {workers}, chunk = {chunk})"
            )));
        }
        Ok(Self {
            workers,
            chunk,
            reduction: Reduction::PairwiseTree,
        })
    }

    pub fn sequential() -> Self {
        Self {
            workers: 1,
            chunk: DEFAULT_CHUNK,
            reduction: Reduction::PairwiseTree,
        }
    }

    pub fn with_workers(self, workers: usize) -> Result<Self> {
        Self::new(workers, self.chunk)
    }

    fn chunks(&self, n: usize) -> Vec<Range<usize>> {
        (0..n)
            .step_by(self.chunk)
            .map(|start| start..(start + self.chunk).min(n))
            .collect()
    }

    /// Evaluates `task` on every chunk, returning results in chunk order.
    fn map_chunks<T, F>(&self, n: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<usize>) -> T + Sync + Send,
    {
        let chunks = self.chunks(n);
        if self.workers == 1 || chunks.len() <= 1 {
            return chunks.into_iter().map(task).collect();
        }
        pool(self.workers).install(|| chunks.into_par_iter().map(task).collect())
    }
}

fn pool(workers: usize) -> Arc<ThreadPool> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    pools
        .entry(workers)
        .or_insert_with(|| {
            Arc::new(
                ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .thread_name(move |i| format!("spca-{workers}-{i}"))
                    .build()
                    .expect("failed to build worker pool"),
            )
        })
        .clone()
}

/// Merges partials with a fixed-shape pairwise tree: the left half and the
/// right half are reduced recursively, then combined left into right order.
pub fn pairwise_tree<T>(mut parts: Vec<T>, combine: &impl Fn(T, T) -> T) -> Option<T> {
    match parts.len() {
        0 => None,
        1 => parts.pop(),
        len => {
            let right = parts.split_off(len / 2);
            let l = pairwise_tree(parts, combine)?;
            let r = pairwise_tree(right, combine)?;
            Some(combine(l, r))
        }
    }
}

fn add_into(mut l: Vec<f64>, r: Vec<f64>) -> Vec<f64> {
    for (a, b) in l.iter_mut().zip(r) {
        *a += b;
    }
    l
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Thresholded weight of a column with correlation `c = a_iᵀx`, so that the
/// gradient of the reformulated objective is `Σ_i weight(c_i) a_i`.
///
/// L1: `2μ sign(c) [μ|c| − γ]₊`. L0: `2μ² 1{(μc)² > γ} c`.
#[inline]
pub fn threshold_weight(c: f64, gamma: f64, mu: f64, penalty: Penalty) -> f64 {
    match penalty {
        Penalty::L1 => 2.0 * mu * sign(c) * positive_part(mu * c.abs() - gamma),
        Penalty::L0 => {
            let s = mu * c;
            if s * s > gamma {
                2.0 * mu * mu * c
            } else {
                0.0
            }
        }
    }
}

/// Contribution of one column to the reformulated objective.
///
/// L1: `[μ|c| − γ]₊²`. L0: `[(μc)² − γ]₊`.
#[inline]
pub fn threshold_term(c: f64, gamma: f64, mu: f64, penalty: Penalty) -> f64 {
    match penalty {
        Penalty::L1 => {
            let t = positive_part(mu * c.abs() - gamma);
            t * t
        }
        Penalty::L0 => positive_part((mu * c) * (mu * c) - gamma),
    }
}

/// All correlations `a_iᵀx`, `i = 1..n`.
pub fn par_matvec_t(a: &DataMatrix, x: &[f64], plan: &KernelPlan) -> Result<Vec<f64>> {
    check_len("par_matvec_t", a.p(), x.len())?;
    let parts = plan.map_chunks(a.n(), |range| {
        range.map(|i| dot(a.column(i), x)).collect::<Vec<f64>>()
    });
    Ok(parts.concat())
}

/// `Σ_i w_i a_i` with chunked partial sums merged by the pairwise tree.
pub fn par_weighted_column_sum(a: &DataMatrix, weights: &[f64], plan: &KernelPlan) -> Result<Vec<f64>> {
    check_len("par_weighted_column_sum", a.n(), weights.len())?;
    let p = a.p();
    let parts = plan.map_chunks(a.n(), |range| {
        let mut acc = vec![0.0; p];
        for i in range {
            let w = weights[i];
            if w != 0.0 {
                for (dst, v) in acc.iter_mut().zip(a.column(i)) {
                    *dst += w * v;
                }
            }
        }
        acc
    });
    Ok(pairwise_tree(parts, &add_into).unwrap_or_else(|| vec![0.0; p]))
}

/// `A z` for an `n`-vector `z`: the Gram application used by `zᵀAᵀAz`.
pub fn par_gram_apply(a: &DataMatrix, z: &[f64], plan: &KernelPlan) -> Result<Vec<f64>> {
    check_len("par_gram_apply", a.n(), z.len())?;
    par_weighted_column_sum(a, z, plan)
}

/// Thresholded gradient accumulation `Σ_i w(c_i, γ) a_i` with `μ = 1`.
pub fn par_threshold_accumulate(
    a: &DataMatrix,
    correlations: &[f64],
    gamma: f64,
    penalty: Penalty,
    plan: &KernelPlan,
) -> Result<Vec<f64>> {
    par_threshold_accumulate_weighted(a, correlations, gamma, 1.0, penalty, plan)
}

/// Thresholded gradient accumulation with a block weight `μ`.
pub fn par_threshold_accumulate_weighted(
    a: &DataMatrix,
    correlations: &[f64],
    gamma: f64,
    mu: f64,
    penalty: Penalty,
    plan: &KernelPlan,
) -> Result<Vec<f64>> {
    check_len("par_threshold_accumulate", a.n(), correlations.len())?;
    let weights: Vec<f64> = correlations
        .iter()
        .map(|&c| threshold_weight(c, gamma, mu, penalty))
        .collect();
    par_weighted_column_sum(a, &weights, plan)
}

/// `Σ_i term(c_i)` summed per chunk, chunks merged by the pairwise tree.
pub fn threshold_objective(correlations: &[f64], gamma: f64, mu: f64, penalty: Penalty, chunk: usize) -> f64 {
    let parts: Vec<f64> = correlations
        .chunks(chunk.max(1))
        .map(|c| c.iter().map(|&v| threshold_term(v, gamma, mu, penalty)).sum())
        .collect();
    pairwise_tree(parts, &|l, r| l + r).unwrap_or(0.0)
}

/// Kernels available to the scaling harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelId {
    MatvecT,
    ThresholdAccumulate,
    GramApply,
}

impl KernelId {
    pub fn name(self) -> &'static str {
        match self {
            KernelId::MatvecT => "matvec_t",
            KernelId::ThresholdAccumulate => "threshold_accumulate",
            KernelId::GramApply => "gram_apply",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScalingOptions {
    /// Random instances per size; medians are taken over these.
    pub instances: usize,
    pub chunk: usize,
    pub seed: u64,
    /// Largest matrix accepted, in bytes, checked before allocating.
    pub max_bytes: u64,
}

impl Default for ScalingOptions {
    fn default() -> Self {
        Self {
            instances: 20,
            chunk: DEFAULT_CHUNK,
            seed: 0,
            max_bytes: 4 << 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub p: usize,
    pub n: usize,
    pub workers: usize,
    pub median_seconds: f64,
    /// Median time at one worker divided by this row's median time.
    pub speedup: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingTable {
    pub kernel: KernelId,
    pub rows: Vec<ScalingRow>,
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// Times `kernel` on Gaussian `P x N` instances for every worker count.
///
/// Rows come out sorted by `N` (then `P`, then workers). The single-worker
/// baseline is always measured, so the speedup of the `workers = 1` row is 1.
pub fn measure_scaling(
    kernel: KernelId,
    sizes: &[(usize, usize)],
    workers: &[usize],
    options: &ScalingOptions,
) -> Result<ScalingTable> {
    if sizes.is_empty() {
        return Err(SpcaError::InvalidConfig(
            "measure_scaling needs at least one size".into(),
        ));
    }
    if options.instances == 0 {
        return Err(SpcaError::InvalidConfig("instances must be positive".into()));
    }
    let mut sizes = sizes.to_vec();
    sizes.sort_by_key(|&(p, n)| (n, p));
    sizes.dedup();
    for &(p, n) in &sizes {
        let bytes = (p as u64).saturating_mul(n as u64).saturating_mul(8);
        if bytes > options.max_bytes {
            return Err(SpcaError::TooLarge {
                bytes,
                limit: options.max_bytes,
            });
        }
        if p == 0 || n == 0 {
            return Err(SpcaError::EmptyMatrix { rows: p, cols: n });
        }
    }
    let mut worker_counts: Vec<usize> = std::iter::once(1).chain(workers.iter().copied()).collect();
    worker_counts.sort_unstable();
    worker_counts.dedup();
    let plans = worker_counts
        .iter()
        .map(|&w| KernelPlan::new(w, options.chunk))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (size_idx, &(p, n)) in sizes.iter().enumerate() {
        let mut times = vec![Vec::with_capacity(options.instances); plans.len()];
        for instance in 0..options.instances {
            let mut rng =
                ChaCha8Rng::seed_from_u64(options.seed ^ ((size_idx as u64) << 32) ^ instance as u64);
            let a = DataMatrix::new(nalgebra::DMatrix::from_fn(p, n, |_, _| {
                StandardNormal.sample(&mut rng)
            }))?;
            let x: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
            let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let corr = par_matvec_t(&a, &x, &KernelPlan::sequential())?;
            for (slot, plan) in plans.iter().enumerate() {
                let start = Instant::now();
                let out = match kernel {
                    KernelId::MatvecT => par_matvec_t(&a, &x, plan)?,
                    KernelId::ThresholdAccumulate => {
                        par_threshold_accumulate(&a, &corr, 0.0, Penalty::L1, plan)?
                    }
                    KernelId::GramApply => par_gram_apply(&a, &z, plan)?,
                };
                times[slot].push(start.elapsed().as_secs_f64());
                std::hint::black_box(out);
            }
        }
        let medians: Vec<f64> = times.iter_mut().map(|t| median(t)).collect();
        let baseline = medians[0];
        for (plan, &med) in plans.iter().zip(&medians) {
            let speedup = if plan.workers == 1 { 1.0 } else { baseline / med };
            rows.push(ScalingRow {
                p,
                n,
                workers: plan.workers,
                median_seconds: med,
                speedup,
            });
        }
    }
    Ok(ScalingTable { kernel, rows })
}
