//! Threshold adaptation models and clinical risk classification.

mod clinical;
mod config;
mod models;

use thiserror::Error;

pub use clinical::{classify, ClinicalRange, Direction, Parameter, RangeTable, RiskLevel};
pub use config::parse_model_call;
pub use models::{
    alpha_from_n, avg_confidence, ewma_series, ewma_step, sma, step_model, wma, wma_with, EwmaAccumulator, EwmaInit,
    SampleHistory, StepFunction, ThresholdModel, WmaWeighting,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThresholdError {
    #[error("insufficient history: need {needed} samples, have {available}")]
    InsufficientHistory { needed: usize, available: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{x} is outside the step domain [{lo}, {hi}]")]
    Domain { x: String, lo: String, hi: String },
    #[error("unknown parameter '{0}'")]
    UnknownParameter(String),
    #[error("model config: {0}")]
    Config(String),
}
