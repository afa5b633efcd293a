//! Initial estimates for missing cells before co-optimization: column-mean
//! filling and one-pass random-forest iterative imputation.
//!
//! ```
//! use ffeam::dataset::{generate_synthetic, inject_missing, InjectionSpec, SyntheticSpec};
//! use ffeam::prefill::{prefill, PrefillConfig};
//!
//! let table = generate_synthetic(&SyntheticSpec::new(60, 3, 0, 1).unwrap()).unwrap();
//! let (masked, _) = inject_missing(&table, &InjectionSpec::new(0.15, 2).unwrap()).unwrap();
//!
//! let filled = prefill(&masked, &PrefillConfig::default()).unwrap();
//! // every placeholder now holds a finite estimate, but the mask still
//! // remembers which cells were filled
//! assert_eq!(filled.n_missing(), masked.n_missing());
//! assert!(filled.missing_cells().iter().all(|&(i, j)| filled.values.at(i, j).is_finite()));
//! ```

mod tree;

pub use tree::RegressionTree;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::NumericTable;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Random-forest hyperparameters for pre-filling.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    /// Fraction of features considered per split, rounded up to >= 1.
    pub feature_subsample: f64,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 50,
            max_depth: 10,
            min_samples_leaf: 2,
            feature_subsample: 1.0 / 3.0,
            seed: 0,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 || self.max_depth == 0 || self.min_samples_leaf == 0 {
            return Err(Error::InvalidSpec(
                "forest n_trees, max_depth, min_samples_leaf must be positive".into(),
            ));
        }
        if !(0.0 < self.feature_subsample && self.feature_subsample <= 1.0) {
            return Err(Error::InvalidSpec(
                "feature_subsample must be in (0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Which pre-fill to run before training.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrefillMethod {
    Mean,
    Forest,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PrefillConfig {
    pub method: PrefillMethod,
    pub forest: ForestConfig,
}

impl Default for PrefillConfig {
    fn default() -> Self {
        Self {
            method: PrefillMethod::Forest,
            forest: ForestConfig::default(),
        }
    }
}

pub fn prefill(table: &NumericTable, cfg: &PrefillConfig) -> Result<NumericTable> {
    match cfg.method {
        PrefillMethod::Mean => mean_prefill(table),
        PrefillMethod::Forest => forest_prefill(table, &cfg.forest),
    }
}

/// Fill each missing cell with its column's observed mean. The mask is left
/// unchanged so downstream code still knows which cells were imputed.
pub fn mean_prefill(table: &NumericTable) -> Result<NumericTable> {
    let mut out = table.clone();
    for j in 0..table.n_cols() {
        let missing: Vec<usize> = (0..table.n_rows())
            .filter(|&i| !table.is_observed(i, j))
            .collect();
        if missing.is_empty() {
            continue;
        }
        let mean = table.observed_mean(j)?;
        for i in missing {
            *out.values.at_mut(i, j) = mean;
        }
    }
    Ok(out)
}

/// A bagged ensemble of regression trees; the prediction is the arithmetic
/// mean of the trees' predictions.
pub struct Forest {
    trees: Vec<RegressionTree>,
}

impl Forest {
    /// Each tree gets a bootstrap sample and an independent random stream
    /// derived from (seed, tree index), so training order does not matter.
    pub fn fit(x: &Matrix, y: &[f64], cfg: &ForestConfig) -> Result<Self> {
        cfg.validate()?;
        if y.len() < 2 * cfg.min_samples_leaf {
            return Err(Error::InvalidSpec(format!(
                "need at least {} training rows, got {}",
                2 * cfg.min_samples_leaf,
                y.len()
            )));
        }
        let trees: Vec<RegressionTree> = (0..cfg.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, t as u64));
                let idx: Vec<usize> = (0..y.len()).map(|_| rng.gen_range(0..y.len())).collect();
                RegressionTree::fit(x, y, &idx, cfg, &mut rng)
            })
            .collect();
        Ok(Self { trees })
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(row)).sum::<f64>() / self.trees.len() as f64
    }

    pub fn trees(&self) -> &[RegressionTree] {
        &self.trees
    }
}

fn mix_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 of (seed + stream step)
    let mut z = seed.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Column processing order for iterative imputation: ascending count of
/// missing cells, ties broken by column index.
pub fn fill_order(table: &NumericTable) -> Vec<usize> {
    let n = table.n_rows();
    let mut order: Vec<usize> = (0..table.n_cols()).collect();
    order.sort_by_key(|&j| (n - table.observed_per_col(j), j));
    order
}

/// One-pass iterative forest imputation. Columns are processed in ascending
/// count of missing cells (ties by index); each target column's forest is
/// trained on rows where the target is observed, with all other columns as
/// predictors at their current values. Predictions are written back before
/// the next column is processed. Missing predictors not yet processed are
/// mean-filled transiently.
pub fn forest_prefill(table: &NumericTable, cfg: &ForestConfig) -> Result<NumericTable> {
    table.validate()?;
    cfg.validate()?;
    if table.is_complete() {
        return Ok(table.clone());
    }
    let (n, s) = (table.n_rows(), table.n_cols());

    // Working matrix starts mean-filled; fills become permanent per column.
    let mut work = mean_prefill(table)?.values;

    let order = fill_order(table);
    let missing_count: Vec<usize> = (0..s).map(|j| n - table.observed_per_col(j)).collect();

    for &target in &order {
        if missing_count[target] == 0 {
            continue;
        }
        let predictors: Vec<usize> = (0..s).filter(|&j| j != target).collect();
        let train_rows: Vec<usize> = (0..n).filter(|&i| table.is_observed(i, target)).collect();
        let x = Matrix::from_fn(n, predictors.len(), |i, pj| work.at(i, predictors[pj]));
        let y: Vec<f64> = (0..n).map(|i| work.at(i, target)).collect();
        let x_train = x.select_rows(&train_rows);
        let y_train: Vec<f64> = train_rows.iter().map(|&i| y[i]).collect();
        let forest = Forest::fit(&x_train, &y_train, cfg)?;
        for i in 0..n {
            if !table.is_observed(i, target) {
                *work.at_mut(i, target) = forest.predict(x.row(i));
            }
        }
    }

    Ok(NumericTable::with_mask(
        work,
        table.mask().to_vec(),
        table.column_names.clone(),
    ))
}
