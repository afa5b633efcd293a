//! Missing-value imputation for numeric tables.
//!
//! The centerpiece is a feature-fusion autoencoder whose hidden layer mixes
//! two kinds of neurons: *de-tracking* neurons, which exclude the input
//! attribute they reconstruct (so the model cannot learn the identity map),
//! and *radial-basis* neurons centered on k-means centroids of the
//! pre-filled data. Missing cells are promoted to optimizer variables and
//! trained jointly with the weights.
//!
//! The crate also ships the reference imputers it is benchmarked against
//! (column means, k-nearest-neighbor, a classical autoencoder, and a
//! correlation-enhanced autoassociative network) plus a reproducible
//! benchmark harness with RMSE/MAE evaluation and Welch t-tests.
//!
//! ```
//! use ffeam::dataset::{generate_synthetic, inject_missing, InjectionSpec, SyntheticSpec};
//! use ffeam::model::{train, TrainConfig, RbfConfig};
//! use ffeam::prefill::PrefillConfig;
//! use ffeam::metrics::evaluate;
//!
//! let table = generate_synthetic(&SyntheticSpec::new(80, 4, 0, 7).unwrap()).unwrap();
//! let (masked, truth) = inject_missing(&table, &InjectionSpec::new(0.2, 1).unwrap()).unwrap();
//!
//! let cfg = TrainConfig { epochs: 30, m1: 4, m2: 4, ..TrainConfig::default() };
//! let (filled, log) = train(&masked, &cfg, &PrefillConfig::default(), &RbfConfig::default()).unwrap();
//!
//! let metrics = evaluate(&filled, &truth).unwrap();
//! assert!(metrics.rmse.is_finite());
//! assert_eq!(log.epochs.len(), 30);
//! ```

pub mod baselines;
pub mod bench;
pub mod dataset;
pub mod error;
pub mod matrix;
pub mod metrics;
pub mod model;
pub mod prefill;
pub mod rbf;
pub mod stats;

pub use error::{Error, Result};
