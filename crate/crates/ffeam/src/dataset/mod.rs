//! Tabular numeric data with explicit missingness: ingestion, synthesis,
//! missingness injection, normalization, and CSV serialization.
//!
//! ```
//! use ffeam::dataset::{generate_synthetic, inject_missing, InjectionSpec, SyntheticSpec};
//!
//! let table = generate_synthetic(&SyntheticSpec::new(50, 3, 1, 0).unwrap()).unwrap();
//! let (masked, truth) = inject_missing(&table, &InjectionSpec::new(0.2, 9).unwrap()).unwrap();
//!
//! // floor(0.2 * 50 * 4) cells masked, each remembered with its true value
//! assert_eq!(truth.len(), 40);
//! assert_eq!(masked.n_missing(), truth.len());
//! // guards: no row fully missing, every column keeps >= 2 observations
//! assert!((0..masked.n_rows()).all(|i| masked.observed_per_row(i) >= 1));
//! assert!((0..masked.n_cols()).all(|j| masked.observed_per_col(j) >= 2));
//! ```

mod csv_io;
mod inject;
mod scale;
mod synthetic;
mod table;

pub(crate) use csv_io::load_csv_str;
pub use csv_io::{load_csv, save_csv, save_mask_csv};
pub use inject::{inject_missing, GroundTruth, GroundTruthCell, InjectionSpec};
pub use scale::{denormalize, normalize, ScaleInfo};
pub use synthetic::{generate_synthetic, SyntheticSpec};
pub use table::NumericTable;
