use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

use super::NumericTable;

/// How to knock observed cells out of a complete table (MCAR, uniform over
/// cells), with guards so no row loses all cells and no column drops below
/// two observed values.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct InjectionSpec {
    pub rate: f64,
    pub seed: u64,
}

pub const MIN_OBSERVED_PER_ROW: usize = 1;
pub const MIN_OBSERVED_PER_COL: usize = 2;

impl InjectionSpec {
    pub fn new(rate: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::InvalidSpec(format!(
                "missing rate must be in [0, 1), got {rate}"
            )));
        }
        Ok(Self { rate, seed })
    }
}

/// True value of one masked cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GroundTruthCell {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

pub type GroundTruth = Vec<GroundTruthCell>;

/// Mask `floor(rate * n * s)` uniformly chosen cells of a complete table,
/// skipping any cell whose removal would violate the guards. Deterministic
/// for a fixed (table, spec).
pub fn inject_missing(
    table: &NumericTable,
    spec: &InjectionSpec,
) -> Result<(NumericTable, GroundTruth)> {
    if !table.is_complete() {
        return Err(Error::InvalidSpec(
            "injection input must be fully observed".into(),
        ));
    }
    table.validate()?;
    let (n, s) = (table.n_rows(), table.n_cols());
    let target = (spec.rate * (n * s) as f64).floor() as usize;
    // Provably unsatisfiable: the guards pin at least max(n, 2s) cells.
    let hard_cap = n * s - usize::max(n * MIN_OBSERVED_PER_ROW, s * MIN_OBSERVED_PER_COL);
    if target > hard_cap {
        return Err(Error::RateUnsatisfiable {
            rate: spec.rate,
            rows: n,
            cols: s,
        });
    }

    let mut cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..s).map(move |j| (i, j))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    cells.shuffle(&mut rng);

    let mut row_obs = vec![s; n];
    let mut col_obs = vec![n; s];
    let mut out = table.clone();
    let mut truth = GroundTruth::new();
    for (i, j) in cells {
        if truth.len() == target {
            break;
        }
        if row_obs[i] <= MIN_OBSERVED_PER_ROW || col_obs[j] <= MIN_OBSERVED_PER_COL {
            continue;
        }
        truth.push(GroundTruthCell {
            row: i,
            col: j,
            value: table.values.at(i, j),
        });
        out.set_missing(i, j);
        row_obs[i] -= 1;
        col_obs[j] -= 1;
    }
    Ok((out, truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use rand::Rng;

    fn table(n: usize, s: usize, seed: u64) -> NumericTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = Matrix::from_fn(n, s, |_, _| rng.gen_range(-1.0..1.0));
        NumericTable::complete(m, (0..s).map(|j| format!("c{j}")).collect())
    }

    #[test]
    fn rate_zero_masks_nothing() {
        let t = table(10, 3, 0);
        let (out, truth) = inject_missing(&t, &InjectionSpec::new(0.0, 7).unwrap()).unwrap();
        assert!(truth.is_empty());
        assert!(out.is_complete());
    }

    #[test]
    fn masked_count_is_floor_of_rate() {
        let t = table(150, 4, 1);
        let (out, truth) = inject_missing(&t, &InjectionSpec::new(0.2, 42).unwrap()).unwrap();
        assert_eq!(truth.len(), 120); // floor(0.2 * 600)
        assert_eq!(out.n_missing(), 120);
    }

    #[test]
    fn same_seed_gives_identical_masks() {
        let t = table(30, 5, 2);
        let spec = InjectionSpec::new(0.3, 99).unwrap();
        let (a, _) = inject_missing(&t, &spec).unwrap();
        let (b, _) = inject_missing(&t, &spec).unwrap();
        assert_eq!(a.mask(), b.mask());
    }

    #[test]
    fn guards_hold_after_injection() {
        let t = table(20, 3, 3);
        let (out, _) = inject_missing(&t, &InjectionSpec::new(0.5, 5).unwrap()).unwrap();
        for i in 0..out.n_rows() {
            assert!(out.observed_per_row(i) >= MIN_OBSERVED_PER_ROW);
        }
        for j in 0..out.n_cols() {
            assert!(out.observed_per_col(j) >= MIN_OBSERVED_PER_COL);
        }
    }

    #[test]
    fn unsatisfiable_rate_is_an_error() {
        let t = table(4, 2, 4);
        let err = inject_missing(&t, &InjectionSpec::new(0.9, 0).unwrap());
        assert!(matches!(err, Err(Error::RateUnsatisfiable { .. })));
    }

    #[test]
    fn truth_records_original_values() {
        let t = table(15, 4, 6);
        let (out, truth) = inject_missing(&t, &InjectionSpec::new(0.25, 11).unwrap()).unwrap();
        for c in &truth {
            assert!(!out.is_observed(c.row, c.col));
            assert_eq!(c.value, t.values.at(c.row, c.col));
        }
    }
}
