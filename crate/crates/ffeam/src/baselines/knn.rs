use serde::Serialize;

use crate::dataset::NumericTable;
use crate::error::{Error, Result};

/// Weighted k-nearest-neighbor imputation.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KnnConfig {
    pub k: usize,
    /// Floor added to distances before inverting, so exact matches do not
    /// divide by zero.
    pub epsilon: f64,
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self { k: 5, epsilon: 1e-8 }
    }
}

/// For each incomplete row, find the `k` complete rows nearest in Euclidean
/// distance over the row's observed coordinates, then fill each missing cell
/// with the inverse-distance-weighted average of those rows' values.
pub fn impute_knn(table: &NumericTable, cfg: &KnnConfig) -> Result<NumericTable> {
    table.validate()?;
    if cfg.k == 0 {
        return Err(Error::InvalidSpec("knn k must be >= 1".into()));
    }
    let n = table.n_rows();
    let complete: Vec<usize> = (0..n)
        .filter(|&i| (0..table.n_cols()).all(|j| table.is_observed(i, j)))
        .collect();
    if complete.len() < cfg.k {
        return Err(Error::TooFewCompleteRows {
            k: cfg.k,
            complete: complete.len(),
        });
    }

    let mut out = table.clone();
    for i in 0..n {
        let missing: Vec<usize> = (0..table.n_cols())
            .filter(|&j| !table.is_observed(i, j))
            .collect();
        if missing.is_empty() {
            continue;
        }
        let observed: Vec<usize> = (0..table.n_cols())
            .filter(|&j| table.is_observed(i, j))
            .collect();
        // distance over the incomplete row's observed coordinates only
        let mut dist: Vec<(f64, usize)> = complete
            .iter()
            .map(|&c| {
                let d: f64 = observed
                    .iter()
                    .map(|&j| {
                        let diff = table.values.at(i, j) - table.values.at(c, j);
                        diff * diff
                    })
                    .sum();
                (d.sqrt(), c)
            })
            .collect();
        dist.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let neighbors = &dist[..cfg.k];
        let weights: Vec<f64> = neighbors
            .iter()
            .map(|(d, _)| 1.0 / (d + cfg.epsilon))
            .collect();
        let wsum: f64 = weights.iter().sum();
        for &j in &missing {
            let fill: f64 = neighbors
                .iter()
                .zip(&weights)
                .map(|(&(_, c), &w)| w * table.values.at(c, j))
                .sum::<f64>()
                / wsum;
            *out.values.at_mut(i, j) = fill;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn names(s: usize) -> Vec<String> {
        (0..s).map(|j| format!("c{j}")).collect()
    }

    fn masked(values: Vec<f64>, mask: Vec<bool>, n: usize, s: usize) -> NumericTable {
        NumericTable::with_mask(Matrix::from_vec(n, s, values), mask, names(s))
    }

    #[test]
    fn exact_match_neighbor_dominates_with_k1() {
        // row 3 matches row 0 exactly on its observed coords
        let t = masked(
            vec![
                1.0, 2.0, 9.0, //
                5.0, 6.0, 7.0, //
                8.0, 1.0, 3.0, //
                1.0, 2.0, f64::NAN,
            ],
            vec![
                true, true, true, true, true, true, true, true, true, true, true, false,
            ],
            4,
            3,
        );
        let out = impute_knn(&t, &KnnConfig { k: 1, epsilon: 1e-8 }).unwrap();
        assert!((out.values.at(3, 2) - 9.0).abs() < 1e-9);
    }

    #[test]
    fn uniform_distances_reduce_to_simple_mean() {
        // two complete rows equidistant from the incomplete row
        let t = masked(
            vec![
                1.0, 0.0, 10.0, //
                -1.0, 0.0, 20.0, //
                0.0, 0.0, f64::NAN,
            ],
            vec![true, true, true, true, true, true, true, true, false],
            3,
            3,
        );
        let out = impute_knn(&t, &KnnConfig { k: 2, epsilon: 1e-8 }).unwrap();
        assert!((out.values.at(2, 2) - 15.0).abs() < 1e-9);
    }

    #[test]
    fn six_row_fixture_matches_brute_force_weights() {
        let values = vec![
            0.0, 0.0, 1.0, //
            1.0, 0.0, 2.0, //
            0.0, 1.0, 3.0, //
            2.0, 2.0, 4.0, //
            3.0, 3.0, 5.0, //
            0.5, 0.2, f64::NAN,
        ];
        let mut mask = vec![true; 18];
        mask[17] = false;
        let t = masked(values, mask, 6, 3);
        let cfg = KnnConfig { k: 2, epsilon: 1e-8 };
        let out = impute_knn(&t, &cfg).unwrap();

        // brute force: distances of row 5 to each complete row on cols 0,1
        let rows = [
            ([0.0, 0.0], 1.0),
            ([1.0, 0.0], 2.0),
            ([0.0, 1.0], 3.0),
            ([2.0, 2.0], 4.0),
            ([3.0, 3.0], 5.0),
        ];
        let q = [0.5f64, 0.2];
        let mut d: Vec<(f64, f64)> = rows
            .iter()
            .map(|(p, v)| {
                (
                    ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt(),
                    *v,
                )
            })
            .collect();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let w0 = 1.0 / (d[0].0 + cfg.epsilon);
        let w1 = 1.0 / (d[1].0 + cfg.epsilon);
        let expected = (w0 * d[0].1 + w1 * d[1].1) / (w0 + w1);
        assert!((out.values.at(5, 2) - expected).abs() < 1e-12);
    }

    #[test]
    fn too_few_complete_rows_is_an_error() {
        let t = masked(
            vec![1.0, 2.0, 3.0, f64::NAN, 5.0, 6.0],
            vec![true, true, true, false, true, true],
            3,
            2,
        );
        let err = impute_knn(&t, &KnnConfig { k: 3, epsilon: 1e-8 });
        assert!(matches!(err, Err(Error::TooFewCompleteRows { .. })));
    }

    #[test]
    fn fills_are_convex_combinations_of_neighbor_values() {
        use rand::{Rng, SeedableRng};
        use crate::dataset::{inject_missing, InjectionSpec};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let t = NumericTable::complete(
            Matrix::from_fn(40, 3, |_, _| rng.gen_range(0.0..10.0)),
            names(3),
        );
        let (masked_t, _) = inject_missing(&t, &InjectionSpec::new(0.1, 4).unwrap()).unwrap();
        let out = impute_knn(&masked_t, &KnnConfig::default()).unwrap();
        for (i, j) in masked_t.missing_cells() {
            let col = masked_t.observed_column(j);
            let min = col.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let v = out.values.at(i, j);
            assert!(v >= min - 1e-9 && v <= max + 1e-9);
        }
    }
}
