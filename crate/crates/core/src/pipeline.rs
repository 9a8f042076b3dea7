//! Glue for the full prediction flow: dataset → reservoir features → fitted
//! readout → per-split scores.

use crate::error::{domain, Result};
use crate::readout::{fit_with, mse, predict, FitOptions, ReadoutModel};
use crate::reservoir::{run, FeatureMatrix, ReservoirConfig};
use crate::tasks::Dataset;

/// Everything one run produces.
#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub features: FeatureMatrix,
    pub model: ReadoutModel,
    /// Predictions for every step, washout included.
    pub predictions: Vec<f64>,
    pub mse_train: f64,
    pub mse_test: f64,
}

pub fn run_pipeline(ds: &Dataset, cfg: &ReservoirConfig) -> Result<PipelineResult> {
    run_pipeline_with(ds, cfg, &FitOptions::default())
}

pub fn run_pipeline_with(
    ds: &Dataset,
    cfg: &ReservoirConfig,
    opts: &FitOptions,
) -> Result<PipelineResult> {
    if ds.split.test == 0 {
        return Err(domain("pipeline needs a nonempty test slice"));
    }
    let features = run(&ds.inputs, cfg)?;
    let model = fit_with(features.rows(), &ds.targets, &ds.split, opts)?;
    let predictions = predict(&model, features.rows());
    let tr = ds.split.train_range();
    let te = ds.split.test_range();
    let mse_train = mse(&ds.targets[tr.clone()], &predictions[tr.clone()])?;
    let mse_test = mse(&ds.targets[te.clone()], &predictions[te])?;
    Ok(PipelineResult {
        features,
        model,
        predictions,
        mse_train,
        mse_test,
    })
}
