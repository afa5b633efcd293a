//! Imputation accuracy metrics, evaluated only at the cells that were
//! masked out, against the held-back original values.

use serde::Serialize;

use crate::dataset::{GroundTruth, NumericTable};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Metrics {
    pub rmse: f64,
    pub mae: f64,
    /// Number of cells evaluated.
    pub n_eval: usize,
}

/// Root-mean-square error and mean absolute error of `filled` at the
/// ground-truth cells. Every truth coordinate must be flagged missing in
/// `filled` and hold a finite value.
pub fn evaluate(filled: &NumericTable, truth: &GroundTruth) -> Result<Metrics> {
    if truth.is_empty() {
        return Err(Error::Eval("ground truth holds no cells".into()));
    }
    let mut se = 0.0;
    let mut ae = 0.0;
    for cell in truth {
        if cell.row >= filled.n_rows() || cell.col >= filled.n_cols() {
            return Err(Error::Eval(format!(
                "truth cell ({}, {}) outside a {}x{} table",
                cell.row,
                cell.col,
                filled.n_rows(),
                filled.n_cols()
            )));
        }
        if filled.is_observed(cell.row, cell.col) {
            return Err(Error::Eval(format!(
                "truth cell ({}, {}) is observed in the filled table",
                cell.row, cell.col
            )));
        }
        let v = filled.values.at(cell.row, cell.col);
        if !v.is_finite() {
            return Err(Error::Eval(format!(
                "filled value at ({}, {}) is not finite",
                cell.row, cell.col
            )));
        }
        let e = v - cell.value;
        se += e * e;
        ae += e.abs();
    }
    let n = truth.len() as f64;
    Ok(Metrics {
        rmse: (se / n).sqrt(),
        mae: ae / n,
        n_eval: truth.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::GroundTruthCell;
    use crate::matrix::Matrix;

    fn table(values: Vec<f64>, mask: Vec<bool>, n: usize, s: usize) -> NumericTable {
        NumericTable::with_mask(
            Matrix::from_vec(n, s, values),
            mask,
            (0..s).map(|j| format!("c{j}")).collect(),
        )
    }

    #[test]
    fn hand_computed_rmse_and_mae() {
        // fills 3.0 and 7.0 against truths 1.0 and 4.0: errors 2 and 3
        let filled = table(
            vec![3.0, 2.0, 5.0, 7.0],
            vec![false, true, true, false],
            2,
            2,
        );
        let truth = vec![
            GroundTruthCell { row: 0, col: 0, value: 1.0 },
            GroundTruthCell { row: 1, col: 1, value: 4.0 },
        ];
        let m = evaluate(&filled, &truth).unwrap();
        assert!((m.rmse - (6.5f64).sqrt()).abs() < 1e-12);
        assert!((m.mae - 2.5).abs() < 1e-12);
        assert_eq!(m.n_eval, 2);
    }

    #[test]
    fn perfect_fill_scores_zero() {
        let filled = table(vec![1.5, 2.0], vec![false, true], 1, 2);
        let truth = vec![GroundTruthCell { row: 0, col: 0, value: 1.5 }];
        let m = evaluate(&filled, &truth).unwrap();
        assert_eq!(m.rmse, 0.0);
        assert_eq!(m.mae, 0.0);
    }

    #[test]
    fn empty_truth_is_an_error() {
        let filled = table(vec![1.0, 2.0], vec![true, true], 1, 2);
        assert!(matches!(evaluate(&filled, &vec![]), Err(Error::Eval(_))));
    }

    #[test]
    fn observed_truth_coordinate_is_an_error() {
        let filled = table(vec![1.0, 2.0], vec![true, true], 1, 2);
        let truth = vec![GroundTruthCell { row: 0, col: 1, value: 2.0 }];
        assert!(matches!(evaluate(&filled, &truth), Err(Error::Eval(_))));
    }

    #[test]
    fn out_of_bounds_truth_coordinate_is_an_error() {
        let filled = table(vec![1.0, 2.0], vec![false, true], 1, 2);
        let truth = vec![GroundTruthCell { row: 5, col: 0, value: 1.0 }];
        assert!(matches!(evaluate(&filled, &truth), Err(Error::Eval(_))));
    }

    #[test]
    fn rmse_at_least_mae() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = 30;
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let mask = vec![false; n];
            let filled = table(values, mask, n / 2, 2);
            let truth: GroundTruth = (0..n / 2)
                .flat_map(|i| (0..2).map(move |j| (i, j)))
                .map(|(row, col)| GroundTruthCell {
                    row,
                    col,
                    value: rng.gen_range(-5.0..5.0),
                })
                .collect();
            let m = evaluate(&filled, &truth).unwrap();
            assert!(m.rmse >= m.mae - 1e-12);
        }
    }
}
