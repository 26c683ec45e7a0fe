//! Single-unit sparse PCA (the `sl1` and `sl0` formulations).
//!
//! Both maximize a convex function of a unit vector `x ∈ R^p`:
//!
//! * L1: `f(x) = Σ_i [|a_iᵀx| − γ]₊²`
//! * L0: `f(x) = Σ_i [(a_iᵀx)² − γ]₊`
//!
//! The generalized power step `x ← ∇f(x) / ‖∇f(x)‖` maximizes the
//! linearization of `f` over the sphere, which never decreases a convex `f`.
//! The sparse loading vector is read off the final `x` by thresholding the
//! correlations `a_iᵀx`.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::{Init, Mode, Penalty, RunReport, SolverConfig};
use crate::error::{check_len, Result, SpcaError};
use crate::loadings::SparseLoadings;
use crate::matrix::{check_unit, column_norms, positive_part, sign, DataMatrix};
use crate::parallel::{self, KernelPlan};

/// Tolerance on `‖x‖ − 1` accepted by the public objective functions.
pub const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SingleUnitState {
    pub x: DVector<f64>,
    pub objective: f64,
    pub iteration: usize,
}

/// Result of one power step.
#[derive(Debug, Clone, PartialEq)]
pub enum PowerStep {
    Moved(SingleUnitState),
    /// The ascent direction vanished; the state is returned unchanged.
    FixedPoint(SingleUnitState),
}

/// One single-unit problem instance: data, penalty and threshold.
#[derive(Debug, Clone, Copy)]
pub struct SingleUnitProblem<'a> {
    pub a: &'a DataMatrix,
    pub gamma: f64,
    pub penalty: Penalty,
    pub plan: KernelPlan,
}

impl<'a> SingleUnitProblem<'a> {
    pub fn new(a: &'a DataMatrix, gamma: f64, penalty: Penalty) -> Self {
        Self {
            a,
            gamma,
            penalty,
            plan: KernelPlan::sequential(),
        }
    }

    pub fn with_plan(mut self, plan: KernelPlan) -> Self {
        self.plan = plan;
        self
    }

    pub fn correlations(&self, x: &DVector<f64>) -> Result<Vec<f64>> {
        parallel::par_matvec_t(self.a, x.as_slice(), &self.plan)
    }

    pub fn objective(&self, x: &DVector<f64>) -> Result<f64> {
        let corr = self.correlations(x)?;
        Ok(self.objective_from(&corr))
    }

    fn objective_from(&self, corr: &[f64]) -> f64 {
        parallel::threshold_objective(corr, self.gamma, 1.0, self.penalty, self.plan.chunk)
    }

    pub fn ascent_direction(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let corr = self.correlations(x)?;
        let g = parallel::par_threshold_accumulate(self.a, &corr, self.gamma, self.penalty, &self.plan)?;
        Ok(DVector::from_vec(g))
    }

    /// `x⁺ = g / ‖g‖`, with the objective re-evaluated at `x⁺`.
    pub fn power_step(&self, state: &SingleUnitState, direction: &DVector<f64>) -> Result<PowerStep> {
        check_len("power_step", state.x.len(), direction.len())?;
        let norm = direction.norm();
        if norm == 0.0 {
            return Ok(PowerStep::FixedPoint(state.clone()));
        }
        let x = direction / norm;
        let objective = self.objective(&x)?;
        Ok(PowerStep::Moved(SingleUnitState {
            x,
            objective,
            iteration: state.iteration + 1,
        }))
    }

    /// True when no unit vector activates any column, so `f ≡ 0` on the sphere.
    pub fn is_trivially_zero(&self) -> bool {
        let max_norm = column_norms(self.a).into_iter().fold(0.0, f64::max);
        match self.penalty {
            Penalty::L1 => self.gamma >= max_norm,
            Penalty::L0 => self.gamma >= max_norm * max_norm,
        }
    }

    /// The loading vector maximizing the original penalized form for fixed `x`.
    pub fn recover_pattern(&self, x: &DVector<f64>) -> Result<SparseLoadings> {
        let corr = self.correlations(x)?;
        let z = pattern_from_correlations(&corr, self.gamma, 1.0, self.penalty);
        SparseLoadings::from_columns(self.a.n(), &[z])
    }
}

/// Unnormalized loadings: L1 `sign(c)[μ|c| − γ]₊`, L0 `c·1{(μc)² > γ}`.
pub(crate) fn pattern_from_correlations(corr: &[f64], gamma: f64, mu: f64, penalty: Penalty) -> DVector<f64> {
    DVector::from_iterator(
        corr.len(),
        corr.iter().map(|&c| match penalty {
            Penalty::L1 => sign(c) * positive_part(mu * c.abs() - gamma),
            Penalty::L0 => {
                if (mu * c) * (mu * c) > gamma {
                    c
                } else {
                    0.0
                }
            }
        }),
    )
}

fn checked(a: &DataMatrix, x: &DVector<f64>) -> Result<()> {
    check_unit("single-unit objective", a.p(), x, UNIT_TOL)
}

/// `Σ_i [|a_iᵀx| − γ]₊²`.
pub fn objective_sl1(a: &DataMatrix, x: &DVector<f64>, gamma: f64) -> Result<f64> {
    checked(a, x)?;
    SingleUnitProblem::new(a, gamma, Penalty::L1).objective(x)
}

/// `Σ_i [(a_iᵀx)² − γ]₊`.
pub fn objective_sl0(a: &DataMatrix, x: &DVector<f64>, gamma: f64) -> Result<f64> {
    checked(a, x)?;
    SingleUnitProblem::new(a, gamma, Penalty::L0).objective(x)
}

/// `2 Σ_i sign(a_iᵀx) [|a_iᵀx| − γ]₊ a_i`.
pub fn ascent_direction_sl1(a: &DataMatrix, x: &DVector<f64>, gamma: f64) -> Result<DVector<f64>> {
    checked(a, x)?;
    SingleUnitProblem::new(a, gamma, Penalty::L1).ascent_direction(x)
}

/// `2 Σ_i 1{(a_iᵀx)² > γ} (a_iᵀx) a_i`.
pub fn ascent_direction_sl0(a: &DataMatrix, x: &DVector<f64>, gamma: f64) -> Result<DVector<f64>> {
    checked(a, x)?;
    SingleUnitProblem::new(a, gamma, Penalty::L0).ascent_direction(x)
}

pub fn recover_pattern_sl1(a: &DataMatrix, x: &DVector<f64>, gamma: f64) -> Result<SparseLoadings> {
    checked(a, x)?;
    SingleUnitProblem::new(a, gamma, Penalty::L1).recover_pattern(x)
}

pub fn recover_pattern_sl0(a: &DataMatrix, x: &DVector<f64>, gamma: f64) -> Result<SparseLoadings> {
    checked(a, x)?;
    SingleUnitProblem::new(a, gamma, Penalty::L0).recover_pattern(x)
}

/// `(I − x xᵀ) A`.
pub fn deflate(a: &DataMatrix, x: &DVector<f64>) -> Result<DataMatrix> {
    check_unit("deflate", a.p(), x, UNIT_TOL)?;
    let corr = parallel::par_matvec_t(a, x.as_slice(), &KernelPlan::sequential())?;
    let mut values = a.as_matrix().clone();
    for (i, &c) in corr.iter().enumerate() {
        for (dst, xi) in values.column_mut(i).iter_mut().zip(x.iter()) {
            *dst -= c * xi;
        }
    }
    DataMatrix::new(values)
}

fn unit_or_first_axis(x: DVector<f64>) -> DVector<f64> {
    let norm = x.norm();
    if norm == 0.0 {
        // all-zero data: any unit vector will do
        let mut e = DVector::zeros(x.len());
        e[0] = 1.0;
        return e;
    }
    x / norm
}

/// Candidate starting points; a single one unless `init` is multi-start.
fn initial_points(a: &DataMatrix, init: &Init, component: usize) -> Result<Vec<DVector<f64>>> {
    let p = a.p();
    let gaussian = |seed: u64, count: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(component as u64));
        (0..count)
            .map(|_| DVector::from_fn(p, |_, _| StandardNormal.sample(&mut rng)))
            .collect::<Vec<_>>()
    };
    let starts = match init {
        Init::MaxNormColumn => {
            let norms = column_norms(a);
            let (best, _) = norms
                .iter()
                .enumerate()
                .fold((0, -1.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
            vec![DVector::from_column_slice(a.column(best))]
        }
        Init::RandomOrthonormal { seed } => gaussian(*seed, 1),
        Init::UserSupplied(x0) => {
            check_len("initial point", p, x0.p())?;
            vec![x0.column(component)]
        }
        Init::MultiStart { random_starts, seed } => {
            let mut starts: Vec<DVector<f64>> = (0..a.n())
                .map(|i| DVector::from_column_slice(a.column(i)))
                .filter(|c| c.norm() > 0.0)
                .collect();
            starts.extend(gaussian(*seed, *random_starts));
            if starts.is_empty() {
                starts.push(DVector::zeros(p));
            }
            starts
        }
    };
    Ok(starts.into_iter().map(unit_or_first_axis).collect())
}

struct Trace {
    x: DVector<f64>,
    history: Vec<f64>,
    feasibility: Vec<f64>,
    iterations: usize,
    converged: bool,
}

fn run_power_iteration(
    problem: &SingleUnitProblem<'_>,
    x0: DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<Trace> {
    let objective = problem.objective(&x0)?;
    let mut state = SingleUnitState {
        x: x0,
        objective,
        iteration: 0,
    };
    let mut history = vec![objective];
    let mut feasibility = vec![(state.x.norm() - 1.0).abs()];
    let mut converged = false;
    while state.iteration < max_iter {
        let g = problem.ascent_direction(&state.x)?;
        let next = match problem.power_step(&state, &g)? {
            PowerStep::FixedPoint(_) => {
                converged = true;
                break;
            }
            PowerStep::Moved(next) => next,
        };
        let previous = state.objective;
        state = next;
        history.push(state.objective);
        feasibility.push((state.x.norm() - 1.0).abs());
        if (state.objective - previous).abs() / previous.max(1e-30) < tol {
            converged = true;
            break;
        }
    }
    Ok(Trace {
        x: state.x,
        history,
        feasibility,
        iterations: state.iteration,
        converged,
    })
}

fn solve_component(
    a: &DataMatrix,
    config: &SolverConfig,
    component: usize,
) -> Result<(SparseLoadings, Trace)> {
    let problem = SingleUnitProblem {
        a,
        gamma: config.gamma_at(component),
        penalty: config.penalty,
        plan: config.plan,
    };
    let mut starts = initial_points(a, &config.init, component)?;
    if problem.is_trivially_zero() {
        let x0 = starts.swap_remove(0);
        return Ok((
            SparseLoadings::zeros(a.n(), 1),
            Trace {
                x: x0,
                history: vec![0.0],
                feasibility: vec![0.0],
                iterations: 0,
                converged: true,
            },
        ));
    }
    let mut best: Option<Trace> = None;
    for x0 in starts {
        let trace = run_power_iteration(&problem, x0, config.tol, config.max_iter)?;
        let improves = best
            .as_ref()
            .map_or(true, |b| trace.history.last() > b.history.last());
        if improves {
            best = Some(trace);
        }
    }
    let trace = best.expect("at least one starting point");
    let z = problem.recover_pattern(&trace.x)?;
    Ok((z, trace))
}

/// Extracts one sparse component.
pub fn solve_single_unit(a: &DataMatrix, config: &SolverConfig) -> Result<(SparseLoadings, RunReport)> {
    config.validate()?;
    if config.mode != Mode::SingleUnit {
        return Err(SpcaError::InvalidConfig(
            "solve_single_unit needs mode = single_unit".into(),
        ));
    }
    if config.m != 1 {
        return Err(SpcaError::InvalidConfig(format!(
            "solve_single_unit extracts one component, got m = {}; use solve_multi_sequential",
            config.m
        )));
    }
    let start = Instant::now();
    let (z, trace) = solve_component(a, config, 0)?;
    let report = RunReport {
        objective_history: trace.history.clone(),
        component_histories: vec![trace.history],
        feasibility: trace.feasibility,
        iterations: trace.iterations,
        wall_time: start.elapsed().as_secs_f64(),
        nnz_per_component: z.nnz_per_component(),
        converged: trace.converged,
        directions: DMatrix::from_column_slice(a.p(), 1, trace.x.as_slice()),
    };
    Ok((z, report))
}

/// Extracts `m` components one at a time, deflating `A ← (I − xxᵀ)A` after each.
pub fn solve_multi_sequential(a: &DataMatrix, config: &SolverConfig) -> Result<(SparseLoadings, RunReport)> {
    config.validate()?;
    if config.mode != Mode::SingleUnit {
        return Err(SpcaError::InvalidConfig(
            "solve_multi_sequential needs mode = single_unit".into(),
        ));
    }
    let start = Instant::now();
    let mut current = a.clone();
    let mut parts = Vec::with_capacity(config.m);
    let mut histories = Vec::with_capacity(config.m);
    let mut cumulative = Vec::with_capacity(config.m);
    let mut feasibility = Vec::new();
    let mut directions = DMatrix::zeros(a.p(), config.m);
    let mut iterations = 0;
    let mut converged = true;
    let mut total = 0.0;
    for j in 0..config.m {
        let (z, trace) = solve_component(&current, config, j)?;
        let active = z.nnz_per_component()[0] > 0;
        total += trace.history.last().copied().unwrap_or(0.0);
        cumulative.push(total);
        iterations += trace.iterations;
        converged &= trace.converged;
        feasibility.extend_from_slice(&trace.feasibility);
        directions.set_column(j, &trace.x);
        if active {
            current = deflate(&current, &trace.x)?;
        }
        histories.push(trace.history);
        parts.push(z);
    }
    let z = SparseLoadings::hstack(&parts)?;
    let report = RunReport {
        objective_history: cumulative,
        component_histories: histories,
        feasibility,
        iterations,
        wall_time: start.elapsed().as_secs_f64(),
        nnz_per_component: z.nnz_per_component(),
        converged,
        directions,
    };
    Ok((z, report))
}
