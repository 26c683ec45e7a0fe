//! Dense data matrix and the small notation layer shared by every solver.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Result, SpcaError};
use crate::parallel::{self, KernelPlan};

/// Positive part `max(0, t)`.
#[inline]
pub fn positive_part(t: f64) -> f64 {
    if t > 0.0 {
        t
    } else {
        0.0
    }
}

/// Sign with `sign(0) = 0`.
#[inline]
pub fn sign(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// A `p x n` real matrix whose columns `a_1..a_n` are the variables.
///
/// Storage is column-major, so every column is a contiguous slice of length `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: DMatrix<f64>,
}

impl DataMatrix {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        let (p, n) = values.shape();
        if p == 0 || n == 0 {
            return Err(SpcaError::EmptyMatrix { rows: p, cols: n });
        }
        for col in 0..n {
            for row in 0..p {
                if !values[(row, col)].is_finite() {
                    return Err(SpcaError::NonFinite { row, col });
                }
            }
        }
        Ok(Self { values })
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_slice(p: usize, n: usize, data: &[f64]) -> Result<Self> {
        check_len("DataMatrix::from_row_slice", p * n, data.len())?;
        Self::new(DMatrix::from_row_slice(p, n, data))
    }

    /// Builds a matrix from a list of rows (samples).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(p * n);
        for row in rows {
            check_len("DataMatrix::from_rows", n, row.len())?;
            flat.extend_from_slice(row);
        }
        Self::from_row_slice(p, n, &flat)
    }

    /// Number of rows (sample-space dimension).
    pub fn p(&self) -> usize {
        self.values.nrows()
    }

    /// Number of columns (variables).
    pub fn n(&self) -> usize {
        self.values.ncols()
    }

    /// Column `a_i` as a contiguous slice.
    #[inline]
    pub fn column(&self, i: usize) -> &[f64] {
        let p = self.p();
        &self.values.as_slice()[i * p..(i + 1) * p]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.values
    }
}

/// Subtracts the mean of every column, so each variable has zero mean over the rows.
pub fn center_columns(a: &DataMatrix) -> DataMatrix {
    center_columns_with_mean(a).0
}

/// Like [`center_columns`], also returning the subtracted column means.
pub fn center_columns_with_mean(a: &DataMatrix) -> (DataMatrix, DVector<f64>) {
    let p = a.p();
    let n = a.n();
    let mut means = DVector::zeros(n);
    let mut out = a.values.clone();
    for i in 0..n {
        let col = a.column(i);
        let mean = col.iter().sum::<f64>() / p as f64;
        means[i] = mean;
        for (dst, &v) in out.column_mut(i).iter_mut().zip(col) {
            *dst = v - mean;
        }
    }
    (DataMatrix { values: out }, means)
}

/// Euclidean norm of every column.
pub fn column_norms(a: &DataMatrix) -> Vec<f64> {
    (0..a.n())
        .map(|i| a.column(i).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect()
}

/// `zᵀ(AᵀA)z`, evaluated as `‖Az‖²` without forming the Gram matrix.
pub fn gram_quadratic(a: &DataMatrix, z: &DVector<f64>) -> Result<f64> {
    check_len("gram_quadratic", a.n(), z.len())?;
    let az = parallel::par_gram_apply(a, z.as_slice(), &KernelPlan::sequential())?;
    Ok(az.iter().map(|v| v * v).sum())
}

/// Checks that `x` is a unit vector of length `p` to within `tol`.
pub(crate) fn check_unit(context: &'static str, p: usize, x: &DVector<f64>, tol: f64) -> Result<()> {
    check_len(context, p, x.len())?;
    let norm = x.norm();
    if (norm - 1.0).abs() > tol || !norm.is_finite() {
        return Err(SpcaError::NotUnit { norm });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn positive_part_examples() {
        assert_eq!(positive_part(-3.0), 0.0);
        assert_eq!(positive_part(0.0), 0.0);
        assert_eq!(positive_part(2.5), 2.5);
    }

    #[test]
    fn centering_examples() {
        let a = DataMatrix::from_row_slice(2, 2, &[1.0, 3.0, 3.0, 5.0]).unwrap();
        let c = center_columns(&a);
        assert_eq!(
            c.as_matrix(),
            &DMatrix::from_row_slice(2, 2, &[-1.0, -1.0, 1.0, 1.0])
        );
        // original untouched
        assert_eq!(a.as_matrix()[(0, 0)], 1.0);

        let zero = DataMatrix::new(DMatrix::zeros(3, 4)).unwrap();
        assert_eq!(center_columns(&zero), zero);

        let single = DataMatrix::from_row_slice(1, 3, &[4.0, -2.0, 7.5]).unwrap();
        assert!(center_columns(&single).as_matrix().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn column_norm_examples() {
        let eye = DataMatrix::new(DMatrix::identity(2, 2)).unwrap();
        assert_eq!(column_norms(&eye), vec![1.0, 1.0]);
        let col = DataMatrix::from_row_slice(2, 1, &[3.0, 4.0]).unwrap();
        assert_eq!(column_norms(&col), vec![5.0]);
        let zero = DataMatrix::new(DMatrix::zeros(4, 3)).unwrap();
        assert_eq!(column_norms(&zero), vec![0.0; 3]);
    }

    #[test]
    fn gram_quadratic_examples() {
        let eye = DataMatrix::new(DMatrix::identity(2, 2)).unwrap();
        assert_eq!(
            gram_quadratic(&eye, &DVector::from_vec(vec![1.0, 0.0])).unwrap(),
            1.0
        );
        let d = DataMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]).unwrap();
        assert_eq!(
            gram_quadratic(&d, &DVector::from_vec(vec![0.0, 1.0])).unwrap(),
            9.0
        );
        assert!(matches!(
            gram_quadratic(&d, &DVector::zeros(3)),
            Err(SpcaError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gram_quadratic_matches_explicit_gram() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a: DMatrix<f64> = DMatrix::from_fn(4, 6, |_, _| StandardNormal.sample(&mut rng));
            let z: DVector<f64> = DVector::from_fn(6, |_, _| StandardNormal.sample(&mut rng));
            let sigma = a.transpose() * &a;
            let expected = (z.transpose() * sigma * &z)[(0, 0)];
            let got = gram_quadratic(&DataMatrix::new(a).unwrap(), &z).unwrap();
            assert!((got - expected).abs() <= 1e-12 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(matches!(
            DataMatrix::new(DMatrix::zeros(0, 3)),
            Err(SpcaError::EmptyMatrix { .. })
        ));
        let mut m = DMatrix::zeros(2, 2);
        m[(1, 0)] = f64::NAN;
        assert!(matches!(
            DataMatrix::new(m),
            Err(SpcaError::NonFinite { row: 1, col: 0 })
        ));
    }

    proptest! {
        #[test]
        fn positive_part_idempotent_and_monotone(s in -1e6f64..1e6, t in -1e6f64..1e6) {
            prop_assert_eq!(positive_part(positive_part(t)), positive_part(t));
            if s <= t {
                prop_assert!(positive_part(s) <= positive_part(t));
            }
        }

        #[test]
        fn gram_quadratic_nonnegative(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = DMatrix::from_fn(3, 5, |_, _| StandardNormal.sample(&mut rng));
            let z = DVector::from_fn(5, |_, _| StandardNormal.sample(&mut rng));
            let q = gram_quadratic(&DataMatrix::new(a.clone()).unwrap(), &z).unwrap();
            prop_assert!(q >= 0.0);
            // a vector in the null space of A gives zero
            let w = DVector::from_fn(5, |_, _| StandardNormal.sample(&mut rng));
            let pinv = a.clone().pseudo_inverse(1e-12).unwrap();
            let null = &w - &pinv * (&a * &w);
            let q0 = gram_quadratic(&DataMatrix::new(a).unwrap(), &null).unwrap();
            prop_assert!(q0 <= 1e-12);
        }

        #[test]
        fn centering_idempotent(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = DataMatrix::new(DMatrix::from_fn(6, 4, |_, _| {
                let v: f64 = StandardNormal.sample(&mut rng);
                3.0 + v
            })).unwrap();
            let once = center_columns(&a);
            let twice = center_columns(&once);
            for (x, y) in once.as_matrix().iter().zip(twice.as_matrix().iter()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
    }
}
