//! Reference imputers used for comparison: column means, weighted
//! k-nearest-neighbor, a classical autoencoder, and the
//! correlation-enhanced autoassociative network.
//!
//! ```
//! use ffeam::baselines::{impute_knn, impute_means, KnnConfig};
//! use ffeam::dataset::{generate_synthetic, inject_missing, InjectionSpec, SyntheticSpec};
//!
//! let table = generate_synthetic(&SyntheticSpec::new(60, 3, 0, 1).unwrap()).unwrap();
//! let (masked, _) = inject_missing(&table, &InjectionSpec::new(0.15, 2).unwrap()).unwrap();
//!
//! let by_means = impute_means(&masked).unwrap();
//! let by_knn = impute_knn(&masked, &KnnConfig { k: 3, ..KnnConfig::default() }).unwrap();
//! for (i, j) in masked.missing_cells() {
//!     assert!(by_means.values.at(i, j).is_finite());
//!     assert!(by_knn.values.at(i, j).is_finite());
//! }
//! ```

mod ae;
mod knn;

pub use ae::{impute_classic_ae, AeConfig, AeNet};
pub use knn::{impute_knn, KnnConfig};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dataset::NumericTable;
use crate::error::Result;
use crate::model::{train_loop, Network, TrainConfig, TrainLog};
use crate::prefill::{prefill, mean_prefill, PrefillConfig};

/// Fill every missing cell with its column's observed mean.
pub fn impute_means(table: &NumericTable) -> Result<NumericTable> {
    mean_prefill(table)
}

/// Hyperparameters for the correlation-enhanced baseline: m1 de-tracking
/// (improved) neurons feed the output y, m2 traditional neurons feed the
/// reference output r.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CeAannConfig {
    pub train: TrainConfig,
}

impl Default for CeAannConfig {
    fn default() -> Self {
        Self {
            train: TrainConfig::default(),
        }
    }
}

/// Correlation-enhanced autoassociative network, run under the same
/// co-optimization loop as the feature-fusion model. Only the reference
/// pathway differs: trainable traditional neurons replace the fixed
/// radial-basis units.
pub fn impute_ce_aann(
    table: &NumericTable,
    cfg: &CeAannConfig,
    prefill_cfg: &PrefillConfig,
) -> Result<(NumericTable, TrainLog)> {
    table.validate()?;
    let prefilled = prefill(table, prefill_cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.train.seed);
    let mut net = Network::init_ce_aann(&cfg.train, table.n_cols(), &mut rng);
    train_loop(&mut net, table, &prefilled, &cfg.train, &mut rng, true)
}
