//! k-nearest-neighbor classification in an embedding space.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{check_len, Result, SpcaError};

#[derive(Debug, Clone, PartialEq)]
pub struct KnnResult {
    pub predictions: Vec<i64>,
    /// Fraction of correct predictions, `NaN` when no truth was given.
    pub accuracy: f64,
}

fn squared_distance(a: &DMatrix<f64>, i: usize, b: &DMatrix<f64>, j: usize) -> f64 {
    let mut d = 0.0;
    for c in 0..a.ncols() {
        let t = a[(i, c)] - b[(j, c)];
        d += t * t;
    }
    d
}

/// Classifies every row of `test` by majority vote among its `k` nearest
/// rows of `train` (Euclidean). Equal distances favour the lower training
/// index; tied votes go to the class of the nearest tied neighbor.
pub fn knn_classify(
    train: &DMatrix<f64>,
    train_labels: &[i64],
    test: &DMatrix<f64>,
    test_labels: Option<&[i64]>,
    k: usize,
) -> Result<KnnResult> {
    check_len("knn: train labels", train.nrows(), train_labels.len())?;
    check_len("knn: embedding width", train.ncols(), test.ncols())?;
    if let Some(truth) = test_labels {
        check_len("knn: test labels", test.nrows(), truth.len())?;
    }
    if k == 0 || k > train.nrows() {
        return Err(SpcaError::InvalidConfig(format!(
            "k must be in 1..={}, got {k}",
            train.nrows()
        )));
    }
    let mut predictions = Vec::with_capacity(test.nrows());
    let mut nearest: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
    for t in 0..test.nrows() {
        nearest.clear();
        for r in 0..train.nrows() {
            let d = squared_distance(test, t, train, r);
            if nearest.len() == k && d >= nearest[k - 1].0 {
                continue;
            }
            let at = nearest.partition_point(|&(nd, _)| nd <= d);
            nearest.insert(at, (d, r));
            nearest.truncate(k);
        }
        let mut votes: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
        for (rank, &(_, r)) in nearest.iter().enumerate() {
            let entry = votes.entry(train_labels[r]).or_insert((0, rank));
            entry.0 += 1;
        }
        let (label, _) = votes
            .into_iter()
            .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)))
            .expect("k >= 1");
        predictions.push(label);
    }
    let accuracy = match test_labels {
        Some(truth) if !truth.is_empty() => {
            predictions.iter().zip(truth).filter(|(p, t)| p == t).count() as f64 / truth.len() as f64
        }
        _ => f64::NAN,
    };
    Ok(KnnResult {
        predictions,
        accuracy,
    })
}

/// Accuracy restricted to each true class, keyed by label.
pub fn per_class_accuracy(predictions: &[i64], truth: &[i64]) -> BTreeMap<i64, f64> {
    let mut counts: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    for (p, t) in predictions.iter().zip(truth) {
        let e = counts.entry(*t).or_default();
        e.1 += 1;
        if p == t {
            e.0 += 1;
        }
    }
    counts
        .into_iter()
        .map(|(label, (hit, total))| (label, hit as f64 / total as f64))
        .collect()
}
