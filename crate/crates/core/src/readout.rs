//! The trained classical layer: ordinary least squares from probability
//! triples to targets, with the washout/train/test protocol and MSE scoring.
//!
//! Because the three probabilities sum to one, the design matrix with an
//! intercept is rank-deficient by construction; the minimum-norm solution is
//! taken and flagged, which is expected rather than an error.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::ops::Range;

use crate::error::{domain, Result};

/// Contiguous washout/train/test partition of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub washout: usize,
    pub train: usize,
    pub test: usize,
}

impl SplitSpec {
    pub fn new(washout: usize, train: usize, test: usize) -> Self {
        Self {
            washout,
            train,
            test,
        }
    }

    /// Default protocol: 20 washout, 480 train, remainder test.
    pub fn for_length(len: usize) -> Result<Self> {
        if len <= 500 {
            return Err(domain(format!(
                "series of length {len} too short for the 20/480/rest protocol"
            )));
        }
        Ok(Self::new(20, 480, len - 500))
    }

    pub fn total(&self) -> usize {
        self.washout + self.train + self.test
    }

    pub fn validate(&self, len: usize) -> Result<()> {
        if self.total() != len {
            return Err(domain(format!(
                "split {}+{}+{} does not partition series of length {len}",
                self.washout, self.train, self.test
            )));
        }
        Ok(())
    }

    pub fn train_range(&self) -> Range<usize> {
        self.washout..self.washout + self.train
    }

    pub fn test_range(&self) -> Range<usize> {
        self.washout + self.train..self.total()
    }
}

/// Affine readout over the three output probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutModel {
    pub weights: [f64; 3],
    pub intercept: f64,
    pub ridge: f64,
    /// Set when the training design matrix was rank-deficient and the
    /// minimum-norm solution was taken.
    pub rank_deficient: bool,
}

#[derive(Serialize)]
struct ModelExport<'a> {
    weights: &'a [f64; 3],
    intercept: f64,
    ridge: f64,
}

impl ReadoutModel {
    /// JSON export: `{"weights":[w0,w1,w2],"intercept":b,"ridge":λ}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ModelExport {
            weights: &self.weights,
            intercept: self.intercept,
            ridge: self.ridge,
        })
        .expect("readout model serializes")
    }
}

/// Fitting options; the defaults are an intercept and no regularization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub intercept: bool,
    pub ridge: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            intercept: true,
            ridge: 0.0,
        }
    }
}

/// Least-squares fit of the readout on the training slice; washout rows are
/// excluded entirely and the test slice is untouched.
pub fn fit(rows: &[[f64; 3]], targets: &[f64], split: &SplitSpec) -> Result<ReadoutModel> {
    fit_with(rows, targets, split, &FitOptions::default())
}

pub fn fit_with(
    rows: &[[f64; 3]],
    targets: &[f64],
    split: &SplitSpec,
    opts: &FitOptions,
) -> Result<ReadoutModel> {
    if rows.len() != targets.len() {
        return Err(domain(format!(
            "{} feature rows but {} targets",
            rows.len(),
            targets.len()
        )));
    }
    split.validate(rows.len())?;
    if split.train < 4 {
        return Err(domain("training slice must hold at least 4 rows"));
    }
    if opts.ridge.is_nan() || opts.ridge < 0.0 {
        return Err(domain("ridge parameter must be nonnegative"));
    }

    let range = split.train_range();
    let ncols = if opts.intercept { 4 } else { 3 };
    let x = DMatrix::from_fn(range.len(), ncols, |i, j| {
        if j < 3 {
            rows[range.start + i][j]
        } else {
            1.0
        }
    });
    let y = DVector::from_fn(range.len(), |i, _| targets[range.start + i]);
    // Ridge penalty on the probability weights only, via row augmentation.
    let (sol, rank_deficient) = lstsq::solve_min_norm_ridge(&x, &y, opts.ridge, 3.min(ncols));

    Ok(ReadoutModel {
        weights: [sol[0], sol[1], sol[2]],
        intercept: if opts.intercept { sol[3] } else { 0.0 },
        ridge: opts.ridge,
        rank_deficient,
    })
}

/// Row-wise affine map.
pub fn predict(model: &ReadoutModel, rows: &[[f64; 3]]) -> Vec<f64> {
    rows.iter()
        .map(|r| {
            model.weights[0] * r[0]
                + model.weights[1] * r[1]
                + model.weights[2] * r[2]
                + model.intercept
        })
        .collect()
}

/// Mean squared error (1/N)·Σ (yₜ − ŷₜ)².
pub fn mse(y: &[f64], y_hat: &[f64]) -> Result<f64> {
    if y.is_empty() {
        return Err(domain("MSE of an empty sequence is undefined"));
    }
    if y.len() != y_hat.len() {
        return Err(domain(format!(
            "length mismatch: {} targets vs {} predictions",
            y.len(),
            y_hat.len()
        )));
    }
    let sum: f64 = y.iter().zip(y_hat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(sum / y.len() as f64)
}

pub(crate) mod lstsq {
    use nalgebra::{DMatrix, DVector};

    /// Minimum-norm least-squares solution via SVD, with the rank-deficiency
    /// verdict. Singular values below `max(m, n)·ε·σ_max` are treated as
    /// zero.
    pub fn solve_min_norm(x: &DMatrix<f64>, y: &DVector<f64>) -> (DVector<f64>, bool) {
        let (nrows, ncols) = x.shape();
        let svd = x.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let eps = smax * f64::EPSILON * nrows.max(ncols) as f64;
        let rank = svd.singular_values.iter().filter(|&&s| s > eps).count();
        let sol = svd
            .solve(y, eps)
            .expect("SVD solve with computed factors cannot fail");
        (sol.column(0).into_owned(), rank < ncols)
    }

    /// As [`solve_min_norm`], with a ridge penalty √λ applied to the first
    /// `penalized` columns through row augmentation.
    pub fn solve_min_norm_ridge(
        x: &DMatrix<f64>,
        y: &DVector<f64>,
        ridge: f64,
        penalized: usize,
    ) -> (DVector<f64>, bool) {
        if ridge == 0.0 {
            return solve_min_norm(x, y);
        }
        let (nrows, ncols) = x.shape();
        let sqrt_l = ridge.sqrt();
        let mut aug = DMatrix::zeros(nrows + penalized, ncols);
        aug.view_mut((0, 0), (nrows, ncols)).copy_from(x);
        for j in 0..penalized {
            aug[(nrows + j, j)] = sqrt_l;
        }
        let mut y_aug = DVector::zeros(nrows + penalized);
        y_aug.rows_mut(0, nrows).copy_from(y);
        solve_min_norm(&aug, &y_aug)
    }
}
