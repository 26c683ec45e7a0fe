//! Block sparse PCA (the `bl1` and `bl0` formulations).
//!
//! Both maximize a convex function of `X` on the Stiefel manifold of
//! orthonormal `p x m` matrices:
//!
//! * L1: `f(X) = Σ_j Σ_i [μ_j |a_iᵀx_j| − γ_j]₊²`
//! * L0: `f(X) = Σ_j Σ_i [(μ_j a_iᵀx_j)² − γ_j]₊`
//!
//! Each iteration forms the gradient `G` and moves to its polar factor, the
//! Stiefel point maximizing `Tr(XᵀG)`.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::{Init, Mode, Penalty, RunReport, SolverConfig};
use crate::error::{check_len, Result, SpcaError};
use crate::loadings::{SparseLoadings, StiefelPoint};
use crate::matrix::{column_norms, DataMatrix};
use crate::parallel::{self, KernelPlan};
use crate::single_unit::pattern_from_correlations;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockState {
    pub x: StiefelPoint,
    pub objective: f64,
    pub iteration: usize,
}

/// One block problem instance.
#[derive(Debug, Clone)]
pub struct BlockProblem<'a> {
    pub a: &'a DataMatrix,
    pub gamma: Vec<f64>,
    pub mu: Vec<f64>,
    pub penalty: Penalty,
    pub plan: KernelPlan,
}

impl<'a> BlockProblem<'a> {
    pub fn new(a: &'a DataMatrix, gamma: &[f64], mu: &[f64], penalty: Penalty) -> Result<Self> {
        check_len("block mu", gamma.len(), mu.len())?;
        Ok(Self {
            a,
            gamma: gamma.to_vec(),
            mu: mu.to_vec(),
            penalty,
            plan: KernelPlan::sequential(),
        })
    }

    pub fn with_plan(mut self, plan: KernelPlan) -> Self {
        self.plan = plan;
        self
    }

    pub fn m(&self) -> usize {
        self.gamma.len()
    }

    fn check(&self, x: &StiefelPoint) -> Result<()> {
        check_len("block iterate rows", self.a.p(), x.p())?;
        check_len("block iterate columns", self.m(), x.m())
    }

    fn correlations(&self, x: &StiefelPoint, j: usize) -> Result<Vec<f64>> {
        parallel::par_matvec_t(self.a, x.as_matrix().column(j).as_slice(), &self.plan)
    }

    pub fn objective(&self, x: &StiefelPoint) -> Result<f64> {
        self.check(x)?;
        let mut total = 0.0;
        for j in 0..self.m() {
            let corr = self.correlations(x, j)?;
            total += parallel::threshold_objective(
                &corr,
                self.gamma[j],
                self.mu[j],
                self.penalty,
                self.plan.chunk,
            );
        }
        Ok(total)
    }

    /// Column `j`: L1 `2μ_j Σ_i sign(c)[μ_j|c| − γ_j]₊ a_i`,
    /// L0 `2μ_j² Σ_i 1{(μ_j c)² > γ_j} c a_i`, with `c = a_iᵀx_j`.
    pub fn ascent_direction(&self, x: &StiefelPoint) -> Result<DMatrix<f64>> {
        self.check(x)?;
        let mut g = DMatrix::zeros(self.a.p(), self.m());
        for j in 0..self.m() {
            let corr = self.correlations(x, j)?;
            let col = parallel::par_threshold_accumulate_weighted(
                self.a,
                &corr,
                self.gamma[j],
                self.mu[j],
                self.penalty,
                &self.plan,
            )?;
            g.set_column(j, &DVector::from_vec(col));
        }
        Ok(g)
    }

    pub fn recover_pattern(&self, x: &StiefelPoint) -> Result<SparseLoadings> {
        self.check(x)?;
        let columns = (0..self.m())
            .map(|j| {
                let corr = self.correlations(x, j)?;
                Ok(pattern_from_correlations(
                    &corr,
                    self.gamma[j],
                    self.mu[j],
                    self.penalty,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        SparseLoadings::from_columns(self.a.n(), &columns)
    }

    fn component_is_trivially_zero(&self, j: usize, max_norm: f64) -> bool {
        let reach = self.mu[j] * max_norm;
        match self.penalty {
            Penalty::L1 => self.gamma[j] >= reach,
            Penalty::L0 => self.gamma[j] >= reach * reach,
        }
    }
}

fn numerical_rank(singular_values: &DVector<f64>, rows: usize, cols: usize) -> usize {
    let max = singular_values.iter().copied().fold(0.0, f64::max);
    let tol = rows.max(cols) as f64 * f64::EPSILON * max;
    singular_values.iter().filter(|&&s| s > tol && s > 0.0).count()
}

fn polar_at(g: &DMatrix<f64>, iteration: usize) -> Result<StiefelPoint> {
    let (p, m) = g.shape();
    if m == 0 || m > p {
        return Err(SpcaError::InvalidConfig(format!(
            "polar projection needs 1 <= m <= p, got {p}x{m}"
        )));
    }
    let svd = g.clone().svd(true, true);
    let rank = numerical_rank(&svd.singular_values, p, m);
    if rank < m {
        return Err(SpcaError::RankDeficient {
            rank,
            expected: m,
            iteration,
        });
    }
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => unreachable!("svd requested with both factors"),
    };
    Ok(StiefelPoint::new_unchecked(u * v_t))
}

/// Polar factor `UVᵀ` of the thin SVD `G = UΣVᵀ`.
pub fn polar_projection(g: &DMatrix<f64>) -> Result<StiefelPoint> {
    polar_at(g, 0)
}

/// `Σ_j Σ_i [μ_j |a_iᵀx_j| − γ_j]₊²`.
pub fn objective_bl1(a: &DataMatrix, x: &StiefelPoint, gamma: &[f64], mu: &[f64]) -> Result<f64> {
    BlockProblem::new(a, gamma, mu, Penalty::L1)?.objective(x)
}

/// `Σ_j Σ_i [(μ_j a_iᵀx_j)² − γ_j]₊`.
pub fn objective_bl0(a: &DataMatrix, x: &StiefelPoint, gamma: &[f64], mu: &[f64]) -> Result<f64> {
    BlockProblem::new(a, gamma, mu, Penalty::L0)?.objective(x)
}

pub fn ascent_direction_block(
    a: &DataMatrix,
    x: &StiefelPoint,
    gamma: &[f64],
    mu: &[f64],
    penalty: Penalty,
) -> Result<DMatrix<f64>> {
    BlockProblem::new(a, gamma, mu, penalty)?.ascent_direction(x)
}

/// Orthonormalizes the columns of `m`, failing on (numerical) rank loss.
fn orthonormalize(m: DMatrix<f64>) -> Result<StiefelPoint> {
    let cols = m.ncols();
    let scale = m.amax();
    let qr = m.qr();
    let r = qr.r();
    let rank = (0..cols)
        .filter(|&j| r[(j, j)].abs() > 1e-12 * scale.max(f64::MIN_POSITIVE))
        .count();
    if rank < cols {
        return Err(SpcaError::RankDeficient {
            rank,
            expected: cols,
            iteration: 0,
        });
    }
    Ok(StiefelPoint::new_unchecked(qr.q()))
}

fn initial_point(a: &DataMatrix, m: usize, init: &Init) -> Result<StiefelPoint> {
    let p = a.p();
    match init {
        Init::RandomOrthonormal { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            orthonormalize(DMatrix::from_fn(p, m, |_, _| StandardNormal.sample(&mut rng)))
        }
        Init::MaxNormColumn => {
            let norms = column_norms(a);
            let mut order: Vec<usize> = (0..a.n()).collect();
            order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
            let picked: Vec<DVector<f64>> = order
                .iter()
                .take(m)
                .map(|&i| DVector::from_column_slice(a.column(i)))
                .collect();
            orthonormalize(DMatrix::from_columns(&picked))
        }
        Init::UserSupplied(x0) => {
            check_len("initial point rows", p, x0.p())?;
            check_len("initial point columns", m, x0.m())?;
            Ok(x0.clone())
        }
        Init::MultiStart { .. } => Err(SpcaError::InvalidConfig(
            "multi-start initialization is only available for single-unit solves".into(),
        )),
    }
}

/// Extracts `m` sparse components jointly.
pub fn solve_block(a: &DataMatrix, config: &SolverConfig) -> Result<(SparseLoadings, RunReport)> {
    config.validate()?;
    if config.mode != Mode::Block {
        return Err(SpcaError::InvalidConfig("solve_block needs mode = block".into()));
    }
    let m = config.m;
    if m > a.p().min(a.n()) {
        return Err(SpcaError::InvalidConfig(format!(
            "block solve needs m <= min(p, n) = {}, got {m}",
            a.p().min(a.n())
        )));
    }
    let start = Instant::now();
    let gamma: Vec<f64> = (0..m).map(|j| config.gamma_at(j)).collect();
    let mu: Vec<f64> = (0..m).map(|j| config.mu_at(j)).collect();
    let problem = BlockProblem::new(a, &gamma, &mu, config.penalty)?.with_plan(config.plan);

    let x0 = initial_point(a, m, &config.init)?;
    let max_norm = column_norms(a).into_iter().fold(0.0, f64::max);
    if (0..m).all(|j| problem.component_is_trivially_zero(j, max_norm)) {
        let report = RunReport {
            objective_history: vec![0.0],
            component_histories: vec![vec![0.0]],
            feasibility: vec![x0.residual()],
            iterations: 0,
            wall_time: start.elapsed().as_secs_f64(),
            nnz_per_component: vec![0; m],
            converged: true,
            directions: x0.as_matrix().clone(),
        };
        return Ok((SparseLoadings::zeros(a.n(), m), report));
    }

    let objective = problem.objective(&x0)?;
    let mut state = BlockState {
        x: x0,
        objective,
        iteration: 0,
    };
    let mut history = vec![objective];
    let mut feasibility = vec![state.x.residual()];
    let mut converged = false;
    while state.iteration < config.max_iter {
        let g = problem.ascent_direction(&state.x)?;
        let x = polar_at(&g, state.iteration + 1)?;
        let objective = problem.objective(&x)?;
        let previous = state.objective;
        feasibility.push(x.residual());
        history.push(objective);
        state = BlockState {
            x,
            objective,
            iteration: state.iteration + 1,
        };
        if (objective - previous).abs() / previous.max(1e-30) < config.tol {
            converged = true;
            break;
        }
    }

    let z = problem.recover_pattern(&state.x)?;
    let report = RunReport {
        objective_history: history.clone(),
        component_histories: vec![history],
        feasibility,
        iterations: state.iteration,
        wall_time: start.elapsed().as_secs_f64(),
        nnz_per_component: z.nnz_per_component(),
        converged,
        directions: state.x.as_matrix().clone(),
    };
    Ok((z, report))
}
