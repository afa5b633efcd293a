use serde::Serialize;

use crate::error::Result;

use super::NumericTable;

/// Per-column min-max parameters recorded by [`normalize`]. Constant columns
/// pass through unscaled and are flagged here.
#[derive(Clone, Debug, Serialize)]
pub struct ScaleInfo {
    pub col_min: Vec<f64>,
    pub col_range: Vec<f64>,
    pub constant: Vec<bool>,
}

/// Min-max scale each column to [0, 1] using observed cells only. Constant
/// columns are left untouched and flagged in the returned `ScaleInfo`.
pub fn normalize(table: &NumericTable) -> Result<(NumericTable, ScaleInfo)> {
    table.validate()?;
    let s = table.n_cols();
    let mut info = ScaleInfo {
        col_min: vec![0.0; s],
        col_range: vec![1.0; s],
        constant: vec![false; s],
    };
    for j in 0..s {
        let vals = table.observed_column(j);
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if max > min {
            info.col_min[j] = min;
            info.col_range[j] = max - min;
        } else {
            info.constant[j] = true;
        }
    }
    let mut out = table.clone();
    apply(&mut out, |j, v| {
        if info.constant[j] {
            v
        } else {
            (v - info.col_min[j]) / info.col_range[j]
        }
    });
    Ok((out, info))
}

/// Invert [`normalize`]. Applies to every finite cell, so it also maps filled
/// tables back to original units.
pub fn denormalize(table: &NumericTable, info: &ScaleInfo) -> NumericTable {
    let mut out = table.clone();
    apply(&mut out, |j, v| {
        if info.constant[j] {
            v
        } else {
            v * info.col_range[j] + info.col_min[j]
        }
    });
    out
}

fn apply(table: &mut NumericTable, f: impl Fn(usize, f64) -> f64) {
    for i in 0..table.n_rows() {
        for j in 0..table.n_cols() {
            let v = table.values.at(i, j);
            if v.is_finite() {
                *table.values.at_mut(i, j) = f(j, v);
            }
        }
    }
}

impl ScaleInfo {
    /// Map a single value in column `j` back to original units.
    pub fn denorm_value(&self, j: usize, v: f64) -> f64 {
        if self.constant[j] {
            v
        } else {
            v * self.col_range[j] + self.col_min[j]
        }
    }

    /// Map a single original-units value in column `j` to normalized units.
    pub fn norm_value(&self, j: usize, v: f64) -> f64 {
        if self.constant[j] {
            v
        } else {
            (v - self.col_min[j]) / self.col_range[j]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn names(s: usize) -> Vec<String> {
        (0..s).map(|j| format!("c{j}")).collect()
    }

    #[test]
    fn min_max_scales_to_unit_interval() {
        let m = Matrix::from_vec(3, 2, vec![0.0, 1.0, 5.0, 2.0, 10.0, 3.0]);
        let t = NumericTable::complete(m, names(2));
        let (scaled, _) = normalize(&t).unwrap();
        assert_eq!(scaled.values.at(0, 0), 0.0);
        assert_eq!(scaled.values.at(1, 0), 0.5);
        assert_eq!(scaled.values.at(2, 0), 1.0);
    }

    #[test]
    fn constant_column_passes_through_flagged() {
        let m = Matrix::from_vec(3, 2, vec![4.0, 1.0, 4.0, 2.0, 4.0, 3.0]);
        let t = NumericTable::complete(m, names(2));
        let (scaled, info) = normalize(&t).unwrap();
        assert!(info.constant[0]);
        assert!(!info.constant[1]);
        assert_eq!(scaled.values.at(1, 0), 4.0);
    }

    #[test]
    fn round_trip_is_identity_within_1e12() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let m = Matrix::from_fn(40, 5, |_, _| rng.gen_range(-100.0..100.0));
        let t = NumericTable::complete(m, names(5));
        let (scaled, info) = normalize(&t).unwrap();
        let back = denormalize(&scaled, &info);
        for i in 0..t.n_rows() {
            for j in 0..t.n_cols() {
                assert!((back.values.at(i, j) - t.values.at(i, j)).abs() < 1e-12);
            }
        }
    }
}
