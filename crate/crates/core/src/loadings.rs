//! Solver outputs and iterates: sparse loading matrices and Stiefel points.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, SpcaError};

/// Residual tolerance accepted for user-supplied Stiefel points.
pub const STIEFEL_INPUT_TOL: f64 = 1e-8;

/// `‖XᵀX − I‖_F`.
pub fn stiefel_residual(x: &DMatrix<f64>) -> f64 {
    let m = x.ncols();
    (x.transpose() * x - DMatrix::<f64>::identity(m, m)).norm()
}

/// A `p x m` matrix with orthonormal columns. For `m = 1` this is a unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelPoint {
    values: DMatrix<f64>,
}

impl StiefelPoint {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(values, STIEFEL_INPUT_TOL)
    }

    pub fn with_tolerance(values: DMatrix<f64>, tol: f64) -> Result<Self> {
        let (p, m) = values.shape();
        if m == 0 || m > p {
            return Err(SpcaError::InvalidConfig(format!(
                "Stiefel point needs 1 <= m <= p, got {p}x{m}"
            )));
        }
        let residual = stiefel_residual(&values);
        if !(residual <= tol) {
            return Err(SpcaError::NotStiefel { residual });
        }
        Ok(Self { values })
    }

    pub fn from_unit_vector(x: DVector<f64>) -> Result<Self> {
        let p = x.len();
        Self::new(DMatrix::from_column_slice(p, 1, x.as_slice()))
    }

    /// Wraps a matrix already known to be orthonormal.
    pub(crate) fn new_unchecked(values: DMatrix<f64>) -> Self {
        Self { values }
    }

    pub fn p(&self) -> usize {
        self.values.nrows()
    }

    pub fn m(&self) -> usize {
        self.values.ncols()
    }

    pub fn residual(&self) -> f64 {
        stiefel_residual(&self.values)
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn column(&self, j: usize) -> DVector<f64> {
        self.values.column(j).into_owned()
    }
}

/// An `n x m` loadings matrix `Z` with unit-norm or zero columns and the
/// support of every column.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseLoadings {
    values: DMatrix<f64>,
    pattern: Vec<Vec<usize>>,
}

impl SparseLoadings {
    /// Normalizes each column to unit norm (zero columns stay zero) and records
    /// the nonzero pattern.
    pub fn from_columns(n: usize, columns: &[DVector<f64>]) -> Result<Self> {
        let m = columns.len();
        let mut values = DMatrix::zeros(n, m);
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(SpcaError::DimensionMismatch {
                    context: "SparseLoadings::from_columns",
                    expected: n,
                    found: col.len(),
                });
            }
            let norm = col.norm();
            if norm > 0.0 && norm.is_finite() {
                values.set_column(j, &(col / norm));
            }
        }
        Ok(Self::from_normalized(values))
    }

    /// An all-zero `n x m` loadings matrix.
    pub fn zeros(n: usize, m: usize) -> Self {
        Self {
            values: DMatrix::zeros(n, m),
            pattern: vec![Vec::new(); m],
        }
    }

    fn from_normalized(values: DMatrix<f64>) -> Self {
        let pattern = (0..values.ncols())
            .map(|j| {
                values
                    .column(j)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        Self { values, pattern }
    }

    /// Concatenates single-column loadings side by side.
    pub fn hstack(parts: &[SparseLoadings]) -> Result<Self> {
        let n = parts.first().map_or(0, |p| p.n());
        let columns: Vec<DVector<f64>> = parts
            .iter()
            .flat_map(|p| (0..p.m()).map(move |j| p.column(j)))
            .collect();
        if let Some(bad) = columns.iter().find(|c| c.len() != n) {
            return Err(SpcaError::DimensionMismatch {
                context: "SparseLoadings::hstack",
                expected: n,
                found: bad.len(),
            });
        }
        Ok(Self::from_normalized(DMatrix::from_columns(&columns)))
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn m(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn column(&self, j: usize) -> DVector<f64> {
        self.values.column(j).into_owned()
    }

    /// Indices of the nonzero entries of column `j`, ascending.
    pub fn support(&self, j: usize) -> &[usize] {
        &self.pattern[j]
    }

    pub fn nnz_per_component(&self) -> Vec<usize> {
        self.pattern.iter().map(Vec::len).collect()
    }

    /// Flips each column so that its largest-magnitude entry is positive.
    pub fn canonicalize_signs(&mut self) {
        for j in 0..self.m() {
            let mut col = self.values.column_mut(j);
            let pivot = col
                .iter()
                .copied()
                .fold(0.0f64, |best, v| if v.abs() > best.abs() { v } else { best });
            if pivot < 0.0 {
                // keep exact zeros positive
                col.apply(|v| *v = if *v == 0.0 { 0.0 } else { -*v });
            }
        }
    }

    /// Checks the unit-norm-or-zero and pattern invariants.
    pub fn validate(&self) -> Result<()> {
        for j in 0..self.m() {
            let col = self.values.column(j);
            let norm = col.norm();
            if norm != 0.0 && (norm - 1.0).abs() > 1e-12 {
                return Err(SpcaError::NotUnit { norm });
            }
            let nz: Vec<usize> = col
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, _)| i)
                .collect();
            if nz != self.pattern[j] {
                return Err(SpcaError::Data(format!("pattern mismatch in column {j}")));
            }
        }
        Ok(())
    }
}
