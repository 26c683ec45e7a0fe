//! Solver configuration and run reports.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Result, SpcaError};
use crate::loadings::StiefelPoint;
use crate::parallel::KernelPlan;

/// Sparsity-inducing penalty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Penalty {
    L1,
    L0,
}

/// Single-unit (one component at a time) or block (all components jointly).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    SingleUnit,
    Block,
}

/// One of the four GP-SPCA formulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Sl1,
    Sl0,
    Bl1,
    Bl0,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Sl1, Variant::Sl0, Variant::Bl1, Variant::Bl0];

    pub fn penalty(self) -> Penalty {
        match self {
            Variant::Sl1 | Variant::Bl1 => Penalty::L1,
            Variant::Sl0 | Variant::Bl0 => Penalty::L0,
        }
    }

    pub fn mode(self) -> Mode {
        match self {
            Variant::Sl1 | Variant::Sl0 => Mode::SingleUnit,
            Variant::Bl1 | Variant::Bl0 => Mode::Block,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Sl1 => "sl1",
            Variant::Sl0 => "sl0",
            Variant::Bl1 => "bl1",
            Variant::Bl0 => "bl0",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = SpcaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sl1" => Ok(Variant::Sl1),
            "sl0" => Ok(Variant::Sl0),
            "bl1" => Ok(Variant::Bl1),
            "bl0" => Ok(Variant::Bl0),
            other => Err(SpcaError::InvalidConfig(format!("unknown variant `{other}`"))),
        }
    }
}

/// Starting point of the power iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// Normalized largest-norm column(s) of `A`, orthonormalized for `m > 1`.
    MaxNormColumn,
    /// Thin QR of a seeded Gaussian `p x m` matrix.
    RandomOrthonormal {
        seed: u64,
    },
    UserSupplied(StiefelPoint),
    /// Single-unit only: runs from every nonzero column direction of `A` and
    /// from `random_starts` seeded Gaussian directions, keeping the run with
    /// the highest final objective.
    MultiStart {
        random_starts: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deflation {
    /// `A <- (I - x xᵀ) A`.
    OrthogonalProjection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub penalty: Penalty,
    pub mode: Mode,
    pub m: usize,
    /// Per-component penalty weights; a single entry is broadcast to all components.
    pub gamma: Vec<f64>,
    /// Per-component block weights `μ_j`; a single entry is broadcast.
    pub mu: Vec<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub init: Init,
    pub deflation: Deflation,
    pub plan: KernelPlan,
}

impl SolverConfig {
    pub const DEFAULT_TOL: f64 = 1e-6;
    pub const DEFAULT_MAX_ITER: usize = 1000;

    pub fn single_unit(penalty: Penalty, gamma: f64) -> Self {
        Self {
            penalty,
            mode: Mode::SingleUnit,
            m: 1,
            gamma: vec![gamma],
            mu: vec![1.0],
            tol: Self::DEFAULT_TOL,
            max_iter: Self::DEFAULT_MAX_ITER,
            init: Init::MaxNormColumn,
            deflation: Deflation::OrthogonalProjection,
            plan: KernelPlan::default(),
        }
    }

    pub fn block(penalty: Penalty, m: usize, gamma: f64) -> Self {
        Self {
            mode: Mode::Block,
            m,
            init: Init::RandomOrthonormal { seed: 0 },
            ..Self::single_unit(penalty, gamma)
        }
    }

    pub fn for_variant(variant: Variant, m: usize, gamma: f64) -> Self {
        match variant.mode() {
            Mode::SingleUnit => Self::single_unit(variant.penalty(), gamma).with_m(m),
            Mode::Block => Self::block(variant.penalty(), m, gamma),
        }
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn with_gamma(mut self, gamma: Vec<f64>) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_mu(mut self, mu: Vec<f64>) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn with_plan(mut self, plan: KernelPlan) -> Self {
        self.plan = plan;
        self
    }

    pub fn gamma_at(&self, j: usize) -> f64 {
        if self.gamma.len() == 1 {
            self.gamma[0]
        } else {
            self.gamma[j]
        }
    }

    pub fn mu_at(&self, j: usize) -> f64 {
        if self.mu.len() == 1 {
            self.mu[0]
        } else {
            self.mu[j]
        }
    }

    /// Checks the parameter invariants.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SpcaError::InvalidConfig(msg));
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        for (name, values) in [("gamma", &self.gamma), ("mu", &self.mu)] {
            if values.len() != 1 && values.len() != self.m {
                return bad(format!(
                    "{name} needs 1 or m = {} entries, got {}",
                    self.m,
                    values.len()
                ));
            }
        }
        if let Some(g) = self.gamma.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return bad(format!("gamma must be finite and >= 0, got {g}"));
        }
        if let Some(mu) = self.mu.iter().find(|mu| !(mu.is_finite() && **mu > 0.0)) {
            return bad(format!("mu must be finite and > 0, got {mu}"));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be > 0, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if matches!(self.init, Init::MultiStart { .. }) && self.mode == Mode::Block {
            return bad("multi-start initialization is only available for single-unit solves".into());
        }
        if let Init::UserSupplied(x0) = &self.init {
            // single-unit runs take column j as the start of component j
            let expected = self.m;
            if x0.m() != expected {
                return bad(format!(
                    "user-supplied start has {} columns, expected {expected}",
                    x0.m()
                ));
            }
        }
        Ok(())
    }
}

/// Trace and summary of one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    /// Objective after every iteration. For sequential extraction of several
    /// components this is the cumulative objective after each component.
    pub objective_history: Vec<f64>,
    /// Per-iteration objective of every inner run (one entry for block runs).
    pub component_histories: Vec<Vec<f64>>,
    /// Feasibility residual of every iterate: `|‖x‖ − 1|` or `‖XᵀX − I‖_F`.
    pub feasibility: Vec<f64>,
    pub iterations: usize,
    pub wall_time: f64,
    pub nnz_per_component: Vec<usize>,
    pub converged: bool,
    /// Final sphere / Stiefel iterate(s), `p x m`.
    pub directions: DMatrix<f64>,
}

impl RunReport {
    pub fn final_objective(&self) -> f64 {
        self.objective_history.last().copied().unwrap_or(0.0)
    }

    /// Smallest step `f[k+1] − f[k]` over all recorded histories.
    pub fn min_increment(&self) -> f64 {
        self.component_histories
            .iter()
            .chain(std::iter::once(&self.objective_history))
            .flat_map(|h| h.windows(2).map(|w| w[1] - w[0]))
            .fold(f64::INFINITY, f64::min)
    }
}
