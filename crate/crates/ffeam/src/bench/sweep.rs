//! Hidden-layer allocation sweep: train the feature-fusion model for each
//! (m1, m2) split of a fixed hidden budget and report per-split medians.

use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{inject_missing, InjectionSpec};
use crate::error::{Error, Result};
use crate::metrics::evaluate;
use crate::model::train;

use super::config::{DatasetSpec, RunConfig};
use super::runner::{load_dataset, median};

#[derive(Clone, Debug, Serialize)]
pub struct SweepConfig {
    pub dataset: DatasetSpec,
    pub rate: f64,
    pub seeds: Vec<u64>,
    pub total_hidden: usize,
    pub splits: Vec<(usize, usize)>,
    /// Shared training/prefill/clustering settings; m1/m2 are overridden
    /// per split.
    pub base: RunConfig,
}

impl SweepConfig {
    /// Default sweep: every split (m1, m2) with both sides >= 5 out of a
    /// 20-neuron budget.
    pub fn new(dataset: DatasetSpec, rate: f64, base: RunConfig) -> Self {
        let total_hidden = 20;
        Self {
            dataset,
            rate,
            seeds: base.seeds.clone(),
            total_hidden,
            splits: (5..=15).map(|m1| (m1, total_hidden - m1)).collect(),
            base,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.splits.is_empty() || self.seeds.is_empty() {
            return Err(Error::Config("sweep needs splits and seeds".into()));
        }
        for &(m1, m2) in &self.splits {
            if m1 + m2 != self.total_hidden {
                return Err(Error::Config(format!(
                    "split ({m1}, {m2}) does not sum to the hidden budget {}",
                    self.total_hidden
                )));
            }
            if m1 == 0 || m2 == 0 {
                return Err(Error::Config(format!(
                    "split ({m1}, {m2}) must keep both neuron kinds"
                )));
            }
        }
        if !(0.0..1.0).contains(&self.rate) {
            return Err(Error::Config(format!("rate {} outside [0, 1)", self.rate)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitRecord {
    pub m1: usize,
    pub m2: usize,
    pub median_rmse: f64,
    pub median_mae: f64,
    pub n_seeds: usize,
}

/// Train the feature-fusion model per (split, seed) and reduce to medians
/// per split. Any single failure aborts the sweep (unlike the benchmark
/// runner, a sweep is a single coherent experiment).
pub fn sweep_split(cfg: &SweepConfig) -> Result<Vec<SplitRecord>> {
    cfg.validate()?;
    let mut table = load_dataset(&cfg.dataset)?;
    if cfg.base.normalize {
        table = crate::dataset::normalize(&table)?.0;
    }

    let jobs: Vec<(usize, usize, u64)> = cfg
        .splits
        .iter()
        .flat_map(|&(m1, m2)| cfg.seeds.iter().map(move |&s| (m1, m2, s)))
        .collect();
    let results: Vec<Result<(usize, usize, f64, f64)>> = jobs
        .par_iter()
        .map(|&(m1, m2, seed)| {
            let (masked, truth) = inject_missing(&table, &InjectionSpec::new(cfg.rate, seed)?)?;
            let mut train_cfg = cfg.base.ffeam;
            train_cfg.m1 = m1;
            train_cfg.m2 = m2;
            train_cfg.seed = seed;
            let mut prefill_cfg = cfg.base.prefill;
            prefill_cfg.forest.seed = seed;
            let (filled, _) = train(&masked, &train_cfg, &prefill_cfg, &cfg.base.rbf)?;
            let m = evaluate(&filled, &truth)?;
            Ok((m1, m2, m.rmse, m.mae))
        })
        .collect();

    let mut records = Vec::with_capacity(cfg.splits.len());
    for &(m1, m2) in &cfg.splits {
        let mut rmses = Vec::new();
        let mut maes = Vec::new();
        for r in &results {
            let (rm1, rm2, rmse, mae) = r.as_ref().map_err(|e| Error::Eval(e.to_string()))?;
            if (*rm1, *rm2) == (m1, m2) {
                rmses.push(*rmse);
                maes.push(*mae);
            }
        }
        records.push(SplitRecord {
            m1,
            m2,
            median_rmse: median(&rmses),
            median_mae: median(&maes),
            n_seeds: rmses.len(),
        });
    }
    Ok(records)
}

/// Plain-text sweep table for terminal output.
pub fn render_sweep(records: &[SplitRecord]) -> String {
    let mut out = String::from("m1   m2   median_rmse  median_mae  seeds\n");
    for r in records {
        out.push_str(&format!(
            "{:<4} {:<4} {:<12.4} {:<11.4} {}\n",
            r.m1, r.m2, r.median_rmse, r.median_mae, r.n_seeds
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::config::DatasetSource;

    fn base() -> RunConfig {
        RunConfig::parse(
            "datasets = ds3_0\n\
             ffeam.epochs = 3\n\
             prefill.n_trees = 5\n",
        )
        .unwrap()
    }

    fn dataset() -> DatasetSpec {
        DatasetSpec {
            name: "ds3_0".into(),
            source: DatasetSource::Builtin,
        }
    }

    #[test]
    fn bad_split_sum_is_rejected() {
        let mut cfg = SweepConfig::new(dataset(), 0.2, base());
        cfg.splits.push((3, 4));
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn sweep_emits_one_record_per_split() {
        let mut cfg = SweepConfig::new(dataset(), 0.2, base());
        cfg.total_hidden = 6;
        cfg.splits = vec![(2, 4), (3, 3), (4, 2)];
        cfg.seeds = vec![0, 1];
        let records = sweep_split(&cfg).unwrap();
        assert_eq!(records.len(), 3);
        for r in &records {
            assert_eq!(r.n_seeds, 2);
            assert!(r.median_rmse.is_finite());
        }
    }

    #[test]
    fn single_split_matches_direct_training() {
        let mut cfg = SweepConfig::new(dataset(), 0.2, base());
        cfg.total_hidden = 6;
        cfg.splits = vec![(3, 3)];
        cfg.seeds = vec![0];
        let records = sweep_split(&cfg).unwrap();

        let table = load_dataset(&dataset()).unwrap();
        let (masked, truth) =
            inject_missing(&table, &InjectionSpec::new(0.2, 0).unwrap()).unwrap();
        let mut tc = cfg.base.ffeam;
        tc.m1 = 3;
        tc.m2 = 3;
        tc.seed = 0;
        let mut pc = cfg.base.prefill;
        pc.forest.seed = 0;
        let (filled, _) = train(&masked, &tc, &pc, &cfg.base.rbf).unwrap();
        let m = evaluate(&filled, &truth).unwrap();
        assert_eq!(records[0].median_rmse, m.rmse);
    }
}
