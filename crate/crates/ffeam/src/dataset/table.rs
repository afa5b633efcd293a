use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Dense numeric table with an observed/missing cell mask.
///
/// `mask[i*s + j] == true` means cell (i, j) is observed. Missing cells hold a
/// NaN placeholder; consumers must consult the mask and never read the
/// placeholder before pre-filling.
#[derive(Clone, Debug)]
pub struct NumericTable {
    pub values: Matrix,
    mask: Vec<bool>,
    pub column_names: Vec<String>,
}

impl NumericTable {
    /// A fully observed table.
    pub fn complete(values: Matrix, column_names: Vec<String>) -> Self {
        let mask = vec![true; values.rows() * values.cols()];
        Self {
            values,
            mask,
            column_names,
        }
    }

    pub fn with_mask(values: Matrix, mask: Vec<bool>, column_names: Vec<String>) -> Self {
        assert_eq!(mask.len(), values.rows() * values.cols());
        Self {
            values,
            mask,
            column_names,
        }
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.values.rows()
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.values.cols()
    }

    #[inline]
    pub fn is_observed(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.n_cols() + j]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Mark every cell observed. Call once fills are final and the table
    /// should serialize as plain values; errors if any cell is still a
    /// non-finite placeholder.
    pub fn into_observed(mut self) -> Result<Self> {
        for i in 0..self.n_rows() {
            for j in 0..self.n_cols() {
                if !self.values.at(i, j).is_finite() {
                    return Err(Error::NonFinite {
                        what: "cell value",
                        tensor: "values".into(),
                        context: format!("cell ({i}, {j}) was never filled"),
                    });
                }
            }
        }
        self.mask.fill(true);
        Ok(self)
    }

    pub(crate) fn set_missing(&mut self, i: usize, j: usize) {
        let s = self.n_cols();
        self.mask[i * s + j] = false;
        *self.values.at_mut(i, j) = f64::NAN;
    }

    /// Coordinates of all missing cells in row-major order.
    pub fn missing_cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n_rows() {
            for j in 0..self.n_cols() {
                if !self.is_observed(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn n_missing(&self) -> usize {
        self.mask.iter().filter(|&&m| !m).count()
    }

    pub fn is_complete(&self) -> bool {
        self.mask.iter().all(|&m| m)
    }

    pub fn observed_per_row(&self, i: usize) -> usize {
        (0..self.n_cols()).filter(|&j| self.is_observed(i, j)).count()
    }

    pub fn observed_per_col(&self, j: usize) -> usize {
        (0..self.n_rows()).filter(|&i| self.is_observed(i, j)).count()
    }

    /// Observed values of one column.
    pub fn observed_column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows())
            .filter(|&i| self.is_observed(i, j))
            .map(|i| self.values.at(i, j))
            .collect()
    }

    /// Mean of a column's observed values.
    pub fn observed_mean(&self, j: usize) -> Result<f64> {
        let vals = self.observed_column(j);
        if vals.is_empty() {
            return Err(Error::InvalidTable(format!(
                "column {:?} has no observed values",
                self.column_names[j]
            )));
        }
        Ok(vals.iter().sum::<f64>() / vals.len() as f64)
    }

    /// Structural invariants: dimensions, n >= 1, s >= 2, every row has at
    /// least one observed cell and every column at least two.
    pub fn validate(&self) -> Result<()> {
        let (n, s) = (self.n_rows(), self.n_cols());
        if n < 1 || s < 2 {
            return Err(Error::InvalidTable(format!(
                "need at least 1 row and 2 columns, got {n}x{s}"
            )));
        }
        if self.column_names.len() != s {
            return Err(Error::InvalidTable(format!(
                "{} column names for {s} columns",
                self.column_names.len()
            )));
        }
        for i in 0..n {
            if self.observed_per_row(i) == 0 {
                return Err(Error::InvalidTable(format!("row {i} is fully missing")));
            }
        }
        for j in 0..s {
            if self.observed_per_col(j) < 2 {
                return Err(Error::InvalidTable(format!(
                    "column {:?} has fewer than 2 observed values",
                    self.column_names[j]
                )));
            }
        }
        for i in 0..n {
            for j in 0..s {
                if self.is_observed(i, j) && !self.values.at(i, j).is_finite() {
                    return Err(Error::InvalidTable(format!(
                        "observed cell ({i}, {j}) is not finite"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(s: usize) -> Vec<String> {
        (0..s).map(|j| format!("c{j}")).collect()
    }

    #[test]
    fn validate_rejects_thin_tables() {
        let t = NumericTable::complete(Matrix::zeros(3, 1), names(1));
        assert!(t.validate().is_err());
    }

    #[test]
    fn validate_rejects_fully_missing_row() {
        let mut t = NumericTable::complete(Matrix::zeros(2, 2), names(2));
        t.set_missing(1, 0);
        t.set_missing(1, 1);
        assert!(t.validate().is_err());
    }

    #[test]
    fn missing_cells_are_row_major() {
        let mut t = NumericTable::complete(Matrix::zeros(3, 2), names(2));
        t.set_missing(2, 1);
        t.set_missing(0, 0);
        assert_eq!(t.missing_cells(), vec![(0, 0), (2, 1)]);
        assert!(t.values.at(2, 1).is_nan());
    }
}
