use thiserror::Error;

use crate::data::DataError;
use crate::experiment::ExperimentError;
use crate::linear::ModelError;
use crate::metrics::MetricError;
use crate::neighbors::NeighborError;
use crate::oversample::OversampleError;

/// Umbrella error for callers that drive several layers at once.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Neighbor(#[from] NeighborError),
    #[error(transparent)]
    Oversample(#[from] OversampleError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
}

impl Error {
    /// Short machine-readable category, used in the CLI's error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Data(e) => e.kind(),
            Error::Neighbor(_) => "neighbor_pool",
            Error::Oversample(_) => "oversample",
            Error::Metric(_) => "metric",
            Error::Model(_) => "model",
            Error::Experiment(e) => e.kind(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
