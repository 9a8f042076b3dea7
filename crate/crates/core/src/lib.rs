//! Simulation of a single-photon reservoir computer built around a
//! measurement-conditioned interferometer (a photonic memristor), together
//! with the classical readout, benchmark tasks, baselines, hyperparameter
//! search and state-tomography verification used to characterize it.
//!
//! # Layout
//!
//! - [`optics`] — one photon over three modes: unitaries, evolution,
//!   probabilities, reduced states, purity.
//! - [`encoding`] — scalar-to-qubit maps.
//! - [`memristor`] — the feedback rules driving the coupler reflectivity.
//! - [`reservoir`] — the time-stepped loop producing feature rows.
//! - [`readout`] — least-squares readout, splits, MSE.
//! - [`pipeline`] — dataset → features → fitted readout in one call.
//! - [`tasks`] — benchmark generators and loaders.
//! - [`baselines`] — classical polynomial comparison models.
//! - [`hyperopt`] — Adam search for the monomial-task settings.
//! - [`tomography`] — Pauli-measurement reconstruction of the reduced state.

#![allow(clippy::needless_range_loop)]

pub mod baselines;
pub mod encoding;
pub mod error;
pub mod hyperopt;
pub mod memristor;
pub mod optics;
pub mod pipeline;
pub mod readout;
pub mod reservoir;
pub mod tasks;
pub mod tomography;

pub use encoding::EncodingScheme;
pub use error::{Error, Result};
pub use memristor::FeedbackRule;
pub use pipeline::{run_pipeline, PipelineResult};
pub use readout::{ReadoutModel, SplitSpec};
pub use reservoir::{FeatureMatrix, MziPhases, ReservoirConfig};
pub use tasks::Dataset;
