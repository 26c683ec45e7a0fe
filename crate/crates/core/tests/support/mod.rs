//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use spca::DataMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(p: usize, n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    DMatrix::from_fn(p, n, |_, _| StandardNormal.sample(rng))
}

pub fn gaussian_data(p: usize, n: usize, rng: &mut impl Rng) -> DataMatrix {
    DataMatrix::new(gaussian(p, n, rng)).unwrap()
}

/// Reformulated single-unit objective by a scalar loop, no kernels involved.
pub fn scalar_objective(a: &DMatrix<f64>, x: &[f64], gamma: f64, l1: bool) -> f64 {
    let mut total = 0.0;
    for i in 0..a.ncols() {
        let mut c = 0.0;
        for r in 0..a.nrows() {
            c += a[(r, i)] * x[r];
        }
        total += if l1 {
            (c.abs() - gamma).max(0.0).powi(2)
        } else {
            (c * c - gamma).max(0.0)
        };
    }
    total
}

/// Maximum of the single-unit objective over `steps` equally spaced angles
/// of the unit circle (p = 2 only). The objective is even in x, so half a
/// turn covers the circle.
pub fn angular_grid_max(a: &DMatrix<f64>, gamma: f64, l1: bool, steps: usize) -> f64 {
    assert_eq!(a.nrows(), 2);
    let mut best = f64::NEG_INFINITY;
    for k in 0..steps {
        let t = std::f64::consts::PI * k as f64 / steps as f64;
        best = best.max(scalar_objective(a, &[t.cos(), t.sin()], gamma, l1));
    }
    best
}

/// Largest eigenvalue of a small symmetric matrix via its SVD.
pub fn lambda_max(sym: &DMatrix<f64>) -> f64 {
    sym.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Exhaustive L0 optimum `max_S λ_max(A_Sᵀ A_S) − γ|S|` over all supports
/// (the empty support scores 0). Returns (value, best support mask).
pub fn l0_support_enumeration(a: &DMatrix<f64>, gamma: f64) -> (f64, usize) {
    let n = a.ncols();
    let mut best = (0.0, 0usize);
    for mask in 1usize..(1 << n) {
        let cols: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let sub = a.select_columns(&cols);
        let value = lambda_max(&(sub.transpose() * &sub)) - gamma * cols.len() as f64;
        if value > best.0 {
            best = (value, mask);
        }
    }
    best
}

/// Right singular vectors of `a`, ordered by decreasing singular value.
pub fn right_singular_vectors(a: &DMatrix<f64>) -> (Vec<f64>, Vec<DVector<f64>>) {
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.unwrap();
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    (
        order.iter().map(|&k| svd.singular_values[k]).collect(),
        order.iter().map(|&k| v_t.row(k).transpose()).collect(),
    )
}

/// Largest principal angle between the column spans of `a` and `b`.
pub fn max_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let qa = a.clone().qr().q();
    let qb = b.clone().qr().q();
    let cosines = (qa.transpose() * qb).svd(false, false).singular_values;
    let min_cos = cosines.iter().copied().fold(1.0f64, f64::min).clamp(-1.0, 1.0);
    min_cos.acos()
}
