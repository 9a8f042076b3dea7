//! Classical comparison models: polynomial regressions of bounded degree on
//! the current step (optionally also the previous step), fitted by least
//! squares, with repeated-seed statistics.
//!
//! Two regressor choices exist: the raw input series x_t, and the previous
//! output y_t. For one-step-ahead tasks the two coincide (the input *is* the
//! previous output); they differ only for driven recurrences.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::readout::{lstsq::solve_min_norm, mse, SplitSpec};
use crate::tasks::Dataset;

/// Which series the polynomial is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regressor {
    /// The task's input series x_t.
    Input,
    /// The previous output y_t.
    PrevOutput,
}

/// Polynomial baseline: degree plus whether one step of memory is included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineSpec {
    pub degree: u32,
    pub memory: bool,
    pub regressor: Regressor,
}

impl BaselineSpec {
    pub fn new(degree: u32, memory: bool, regressor: Regressor) -> Self {
        Self {
            degree,
            memory,
            regressor,
        }
    }

    /// The four standard rows: L, C, L+M, C+M on the input series.
    pub fn standard_rows() -> [BaselineSpec; 4] {
        [
            Self::new(1, false, Regressor::Input),
            Self::new(3, false, Regressor::Input),
            Self::new(1, true, Regressor::Input),
            Self::new(3, true, Regressor::Input),
        ]
    }

    pub fn label(&self) -> String {
        let head = match self.degree {
            1 => "L".to_string(),
            3 => "C".to_string(),
            d => format!("P{d}"),
        };
        if self.memory {
            format!("{head}+M")
        } else {
            head
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < 1 {
            return Err(domain("baseline degree must be at least 1"));
        }
        Ok(())
    }

    /// Number of columns including the constant term.
    pub fn width(&self) -> usize {
        let d = self.degree as usize;
        if self.memory {
            (d + 1) * (d + 2) / 2
        } else {
            d + 1
        }
    }
}

/// Design-matrix rows: all monomials of total degree ≤ `degree` in x_t (and
/// x_{t−1} when memory is on), constant column first. The t = 0 row pads the
/// missing predecessor with x₀; the washout hides it from every fit.
pub fn poly_features(xs: &[f64], spec: &BaselineSpec) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    if spec.memory && xs.len() < 2 {
        return Err(domain("memory features need at least 2 samples"));
    }
    let d = spec.degree as i32;
    let mut rows = Vec::with_capacity(xs.len());
    for (t, &x) in xs.iter().enumerate() {
        let prev = if t == 0 { xs[0] } else { xs[t - 1] };
        let mut row = Vec::with_capacity(spec.width());
        for total in 0..=d {
            if spec.memory {
                for i in (0..=total).rev() {
                    row.push(x.powi(i) * prev.powi(total - i));
                }
            } else {
                row.push(x.powi(total));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// A fitted polynomial baseline and its scores.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineFit {
    pub coefficients: Vec<f64>,
    pub mse_train: f64,
    pub mse_test: f64,
}

/// Least squares on the training slice, scored on the test slice.
pub fn fit_baseline(ds: &Dataset, spec: &BaselineSpec, split: &SplitSpec) -> Result<BaselineFit> {
    split.validate(ds.len())?;
    let series: Vec<f64> = match spec.regressor {
        Regressor::Input => ds.inputs.clone(),
        Regressor::PrevOutput => {
            // y_t ahead of target y_{t+1}: the target series shifted by one.
            let mut prev = Vec::with_capacity(ds.len());
            prev.push(ds.targets[0]);
            prev.extend_from_slice(&ds.targets[..ds.len() - 1]);
            prev
        }
    };
    let rows = poly_features(&series, spec)?;
    let width = spec.width();

    let tr = split.train_range();
    let x = DMatrix::from_fn(tr.len(), width, |i, j| rows[tr.start + i][j]);
    let y = DVector::from_fn(tr.len(), |i, _| ds.targets[tr.start + i]);
    let (coef, _) = solve_min_norm(&x, &y);

    let predict = |range: std::ops::Range<usize>| -> Vec<f64> {
        rows[range]
            .iter()
            .map(|row| row.iter().zip(coef.iter()).map(|(a, b)| a * b).sum())
            .collect()
    };
    let mse_train = mse(&ds.targets[tr.clone()], &predict(tr.clone()))?;
    let te = split.test_range();
    let mse_test = mse(&ds.targets[te.clone()], &predict(te))?;
    Ok(BaselineFit {
        coefficients: coef.iter().copied().collect(),
        mse_train,
        mse_test,
    })
}

/// Mean and spread of test MSE for one baseline across repeated seeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRow {
    pub label: String,
    pub mean_mse: f64,
    /// Sample standard deviation; absent for a single run.
    pub std_mse: Option<f64>,
    pub runs: usize,
}

/// Mean and sample standard deviation (absent for fewer than two values).
pub fn mean_std_of(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, Some(var.sqrt()))
}

/// Runs the four standard baselines over `runs` seeded datasets.
/// Deterministic given the base seed.
pub fn baseline_suite<F>(generate: F, runs: usize, base_seed: u64) -> Result<Vec<SuiteRow>>
where
    F: Fn(u64) -> Result<Dataset> + Sync,
{
    if runs < 1 {
        return Err(domain("suite needs at least one run"));
    }
    let per_seed: Vec<[f64; 4]> = (0..runs as u64)
        .into_par_iter()
        .map(|k| -> Result<[f64; 4]> {
            let ds = generate(base_seed + k)?;
            let mut out = [0.0; 4];
            for (i, spec) in BaselineSpec::standard_rows().iter().enumerate() {
                out[i] = fit_baseline(&ds, spec, &ds.split)?.mse_test;
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    Ok(BaselineSpec::standard_rows()
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let column: Vec<f64> = per_seed.iter().map(|row| row[i]).collect();
            let (mean_mse, std_mse) = mean_std_of(&column);
            SuiteRow {
                label: spec.label(),
                mean_mse,
                std_mse,
                runs,
            }
        })
        .collect())
}
