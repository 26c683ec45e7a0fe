//! Sparse principal component analysis with the generalized power method.
//!
//! Four formulations are provided: single-unit and block extraction, each
//! with an L1 or an L0 sparsity penalty. All of them reduce to maximizing a
//! convex function over the unit sphere (single-unit) or the Stiefel
//! manifold (block) and share a small set of column kernels from
//! [`parallel`], whose results do not depend on the worker count.
//!
//! ```
//! use spca::{DataMatrix, Penalty, SolverConfig};
//!
//! let a = DataMatrix::from_row_slice(2, 3, &[3.0, 0.1, 0.0, 0.0, 0.2, 1.0]).unwrap();
//! let config = SolverConfig::single_unit(Penalty::L1, 0.5);
//! let (z, report) = spca::solve_single_unit(&a, &config).unwrap();
//! assert_eq!(z.support(0), &[0]);
//! assert!(report.converged);
//! ```

pub mod bench;
pub mod block;
pub mod cli;
pub mod config;
pub mod error;
pub mod loadings;
pub mod matrix;
pub mod parallel;
pub mod pca;
pub mod single_unit;

pub use block::{ascent_direction_block, objective_bl0, objective_bl1, polar_projection, solve_block};
pub use config::{Deflation, Init, Mode, Penalty, RunReport, SolverConfig, Variant};
pub use error::{Result, SpcaError};
pub use loadings::{SparseLoadings, StiefelPoint};
pub use matrix::{center_columns, column_norms, gram_quadratic, positive_part, DataMatrix};
pub use parallel::KernelPlan;
pub use single_unit::{
    ascent_direction_sl0, ascent_direction_sl1, deflate, objective_sl0, objective_sl1, recover_pattern_sl0,
    recover_pattern_sl1, solve_multi_sequential, solve_single_unit,
};

/// Runs the solver matching `config.mode`, extracting `config.m` components.
pub fn solve(a: &DataMatrix, config: &SolverConfig) -> Result<(SparseLoadings, RunReport)> {
    match config.mode {
        Mode::SingleUnit => solve_multi_sequential(a, config),
        Mode::Block => solve_block(a, config),
    }
}
