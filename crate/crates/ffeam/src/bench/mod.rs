//! Reproducible benchmark harness: configuration, bundled datasets, the
//! cross-product runner, and the hidden-layer allocation sweep.
//!
//! ```
//! use ffeam::bench::{impute_with, load_dataset, Method, RunConfig};
//! use ffeam::dataset::{inject_missing, InjectionSpec};
//!
//! let cfg = RunConfig::parse("knn.k = 3\nnormalize = true\n").unwrap();
//! let iris = load_dataset(&cfg.datasets[0]).unwrap();
//! let (masked, _) = inject_missing(&iris, &InjectionSpec::new(0.2, 0).unwrap()).unwrap();
//!
//! // scaling is internal: fills come back in the table's original units
//! let filled = impute_with(Method::Knn, &masked, &cfg, 0).unwrap();
//! assert!(filled.missing_cells().iter().all(|&(i, j)| filled.values.at(i, j).is_finite()));
//! ```

mod builtin;
mod config;
mod runner;
mod sweep;

pub use builtin::{builtin_dataset, BUILTIN_NAMES};
pub use config::{DatasetSource, DatasetSpec, Method, RunConfig};
pub use runner::{
    aggregate, config_digest, impute_with, load_dataset, median, render_aggregate, run_benchmark,
    write_report, AggregateRow, EvalReport, RunRecord,
};
pub use sweep::{render_sweep, sweep_split, SplitRecord, SweepConfig};
