//! Maintenance-duration prediction and scheduling toolkit.
//!
//! The pipeline: generate (or load) a maintenance-job dataset, split it by
//! time, train per-firmware duration predictors (quantile boosted trees
//! tuned against an overprediction SLO, plus mean-loss and linear
//! baselines), feed predictions into a deterministic maintenance-unit
//! scheduling simulation, and score the outcome.

pub mod domain;
pub mod error;
pub mod features;
pub mod gbt;
pub mod metrics;
pub mod predictor;
pub mod scheduler;
pub mod workload;

pub(crate) mod stats;

pub use error::{Error, Result};
