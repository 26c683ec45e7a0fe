//! Dense PCA baseline and the evaluation quantities shared with sparse PCA.
//!
//! Inputs here are sample matrices with one sample per row; loadings live in
//! the feature space (one column per component).

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Result, SpcaError};
use crate::matrix::{center_columns_with_mean, DataMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    /// `n x m` orthonormal loadings.
    pub components: DMatrix<f64>,
    /// Non-increasing.
    pub singular_values: DVector<f64>,
    pub mean: DVector<f64>,
    pub n_samples: usize,
}

impl PcaModel {
    pub fn transform(&self, samples: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        project(samples, &self.components, &self.mean)
    }

    /// `σ_j² / (N − 1)` for every kept component.
    pub fn explained_variance(&self) -> Vec<f64> {
        let dof = self.n_samples.saturating_sub(1).max(1) as f64;
        self.singular_values.iter().map(|s| s * s / dof).collect()
    }
}

/// Flips every column so its largest-magnitude entry is positive.
pub fn canonicalize_signs(loadings: &mut DMatrix<f64>) {
    for mut col in loadings.column_iter_mut() {
        let pivot = col
            .iter()
            .copied()
            .fold(0.0f64, |best, v| if v.abs() > best.abs() { v } else { best });
        if pivot < 0.0 {
            col.apply(|v| *v = if *v == 0.0 { 0.0 } else { -*v });
        }
    }
}

/// Leading `m` right singular vectors of the column-centered sample matrix.
pub fn pca_fit(samples: &DataMatrix, m: usize) -> Result<PcaModel> {
    let (rows, cols) = (samples.p(), samples.n());
    let rank_cap = rows.min(cols);
    if m == 0 || m > rank_cap {
        return Err(SpcaError::InvalidConfig(format!(
            "PCA needs 1 <= m <= min(#samples, #features) = {rank_cap}, got {m}"
        )));
    }
    let (centered, mean) = center_columns_with_mean(samples);
    let svd = centered.into_matrix().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[j]
            .total_cmp(&svd.singular_values[i])
            .then(i.cmp(&j))
    });
    let keep = &order[..m];
    let mut components =
        DMatrix::from_columns(&keep.iter().map(|&k| v_t.row(k).transpose()).collect::<Vec<_>>());
    canonicalize_signs(&mut components);
    let singular_values = DVector::from_iterator(m, keep.iter().map(|&k| svd.singular_values[k]));
    Ok(PcaModel {
        components,
        singular_values,
        mean,
        n_samples: rows,
    })
}

/// `(samples − 1·meanᵀ) · loadings`.
pub fn project(samples: &DMatrix<f64>, loadings: &DMatrix<f64>, mean: &DVector<f64>) -> Result<DMatrix<f64>> {
    if loadings.ncols() == 0 {
        return Err(SpcaError::InvalidConfig(
            "projection needs at least one loading column".into(),
        ));
    }
    check_len("project: sample width", loadings.nrows(), samples.ncols())?;
    check_len("project: mean length", loadings.nrows(), mean.len())?;
    let mut centered = samples.clone();
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    Ok(centered * loadings)
}

/// Adjusted variance of each loading column.
///
/// Component `j` is credited with the variance of the data after removing
/// the directions spanned by components `1..j-1`, so overlapping sparse
/// loadings are not double counted. For orthonormal loadings this is the
/// plain variance of each score.
pub fn explained_variance(samples: &DataMatrix, loadings: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_len("explained_variance", samples.n(), loadings.nrows())?;
    let (centered, _) = center_columns_with_mean(samples);
    let s = centered.as_matrix();
    let dof = samples.p().saturating_sub(1).max(1) as f64;
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut out = Vec::with_capacity(loadings.ncols());
    for z in loadings.column_iter() {
        let mut residual = z.into_owned();
        for q in &basis {
            let c = q.dot(&residual);
            residual.axpy(-c, q, 1.0);
        }
        let scores = s * &residual;
        out.push(scores.norm_squared() / dof);
        let norm = residual.norm();
        if norm > 1e-12 {
            basis.push(residual / norm);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random(rows: usize, cols: usize, seed: u64) -> DataMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DataMatrix::new(DMatrix::from_fn(rows, cols, |_, _| {
            StandardNormal.sample(&mut rng)
        }))
        .unwrap()
    }

    #[test]
    fn leading_direction_of_symmetric_cloud() {
        let s = DataMatrix::from_row_slice(4, 2, &[3.0, 0.0, -3.0, 0.0, 0.0, 1.0, 0.0, -1.0]).unwrap();
        let model = pca_fit(&s, 1).unwrap();
        assert!((model.components[(0, 0)] - 1.0).abs() < 1e-12);
        assert!(model.components[(1, 0)].abs() < 1e-12);
        // centered SVD by hand: singular values sqrt(18), sqrt(2)
        assert!((model.singular_values[0] - 18f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn full_rank_components_form_basis_and_reconstruct() {
        let s = random(20, 8, 1);
        let model = pca_fit(&s, 8).unwrap();
        let gram = model.components.transpose() * &model.components;
        assert!((gram - DMatrix::identity(8, 8)).amax() < 1e-10);
        let scores = model.transform(s.as_matrix()).unwrap();
        let mut recon = scores * model.components.transpose();
        for mut row in recon.row_iter_mut() {
            row += model.mean.transpose();
        }
        assert!((recon - s.as_matrix()).amax() <= 1e-10);
        let sv = &model.singular_values;
        assert!(sv.as_slice().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rejects_too_many_components() {
        let s = random(3, 5, 2);
        assert!(pca_fit(&s, 4).is_err());
        assert!(pca_fit(&s, 0).is_err());
    }

    #[test]
    fn projection_examples() {
        let s = random(6, 3, 3);
        let mean = DVector::from_vec(vec![0.5, -1.0, 2.0]);
        let id = project(s.as_matrix(), &DMatrix::identity(3, 3), &mean).unwrap();
        for r in 0..6 {
            for c in 0..3 {
                assert_eq!(id[(r, c)], s.as_matrix()[(r, c)] - mean[c]);
            }
        }
        let e1 = DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
        let first = project(s.as_matrix(), &e1, &mean).unwrap();
        assert_eq!(first.column(0), id.column(0));

        let origin = DMatrix::from_row_slice(1, 3, mean.as_slice());
        assert!(project(&origin, &e1, &mean).unwrap().amax() == 0.0);

        // sparse loadings ignore coordinates outside the support
        let sparse = DMatrix::from_column_slice(3, 1, &[0.6, 0.0, 0.8]);
        let mut masked = s.as_matrix().clone();
        masked.column_mut(1).fill(0.0);
        let zero_mean = DVector::zeros(3);
        assert_eq!(
            project(s.as_matrix(), &sparse, &zero_mean).unwrap(),
            project(&masked, &sparse, &zero_mean).unwrap()
        );
        assert!(project(s.as_matrix(), &DMatrix::zeros(2, 1), &zero_mean).is_err());
    }

    #[test]
    fn explained_variance_examples() {
        let s = random(30, 6, 4);
        let model = pca_fit(&s, 4).unwrap();
        let ev = explained_variance(&s, &model.components).unwrap();
        for (got, want) in ev.iter().zip(model.explained_variance()) {
            assert!((got - want).abs() <= 1e-10);
        }

        let mut with_zero = DMatrix::zeros(6, 2);
        with_zero.set_column(0, &model.components.column(0));
        assert_eq!(explained_variance(&s, &with_zero).unwrap()[1], 0.0);

        let mut dup = DMatrix::zeros(6, 2);
        dup.set_column(0, &model.components.column(1));
        dup.set_column(1, &model.components.column(1));
        assert!(explained_variance(&s, &dup).unwrap()[1].abs() <= 1e-12);
    }

    #[test]
    fn pca_bounds_any_unit_loadings() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for seed in 0..50 {
            let s = random(25, 7, 100 + seed);
            let pca = pca_fit(&s, 3).unwrap();
            let bound: f64 = explained_variance(&s, &pca.components).unwrap().iter().sum();
            let mut z = DMatrix::from_fn(7, 3, |_, _| {
                let v: f64 = StandardNormal.sample(&mut rng);
                if v.abs() < 0.6 {
                    0.0
                } else {
                    v
                }
            });
            for mut col in z.column_iter_mut() {
                let norm = col.norm();
                if norm > 0.0 {
                    col /= norm;
                }
            }
            let total: f64 = explained_variance(&s, &z).unwrap().iter().sum();
            assert!(total <= bound + 1e-10);
        }
    }

    #[test]
    fn sample_permutation_invariance() {
        let s = random(15, 5, 5);
        let mut rows: Vec<usize> = (0..15).collect();
        rows.reverse();
        rows.swap(0, 7);
        let permuted = DataMatrix::new(s.as_matrix().select_rows(&rows)).unwrap();
        let a = pca_fit(&s, 3).unwrap();
        let b = pca_fit(&permuted, 3).unwrap();
        for j in 0..3 {
            let (x, y) = (a.components.column(j), b.components.column(j));
            assert!((x - y).amax().min((x + y).amax()) < 1e-8);
        }
    }

    #[test]
    fn scores_match_classical_svd() {
        let s = random(12, 4, 6);
        let model = pca_fit(&s, 4).unwrap();
        let scores = model.transform(s.as_matrix()).unwrap();
        let (centered, _) = center_columns_with_mean(&s);
        let svd = centered.into_matrix().svd(true, false);
        let u = svd.u.unwrap();
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        for (j, &k) in order.iter().enumerate() {
            let us = u.column(k) * svd.singular_values[k];
            let sc = scores.column(j);
            assert!((&us - &sc).amax().min((&us + &sc).amax()) < 1e-8);
        }
    }
}
