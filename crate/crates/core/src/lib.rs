//! Fairness-aware preprocessing for imbalanced tabular data.
//!
//! The crate bundles four layers that build on each other:
//!
//! * [`data`]: dataset representation, CSV ingestion, subgroup partitioning,
//!   imbalance ratios, standardization, stratified folds and the controlled
//!   downsampler used for imbalance sweeps.
//! * [`neighbors`] and [`oversample`]: exact k-nearest-neighbor search and the
//!   resamplers (Fair Oversampling, SMOTE, random oversampling, Reweighing).
//! * [`metrics`] and [`linear`]: per-group confusion accounting, the group
//!   fairness metrics with Fair Utility, and small weight-aware linear
//!   classifiers.
//! * [`experiment`]: the config-driven cross-validation harness behind the
//!   `fairsample` CLI.
//!
//! Batch loops run on rayon when the `parallel` feature is enabled (the
//! default); see [`Execution`].

pub mod data;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod linear;
pub mod metrics;
pub mod neighbors;
pub mod oversample;
pub mod seed;

pub use data::{Dataset, SubgroupPartition};
pub use error::{Error, Result};
pub use exec::Execution;
