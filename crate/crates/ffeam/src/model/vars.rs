use std::collections::HashMap;

use crate::dataset::NumericTable;
use crate::matrix::Matrix;

/// The trainable fill values, one per missing cell, addressed by (row, col).
#[derive(Clone, Debug)]
pub struct MissingVariables {
    coords: Vec<(usize, usize)>,
    values: Vec<f64>,
    index: HashMap<(usize, usize), usize>,
}

impl MissingVariables {
    /// One variable per masked cell of `table`, initialized from the
    /// corresponding cell of `prefilled`.
    pub fn from_prefill(table: &NumericTable, prefilled: &NumericTable) -> Self {
        let coords = table.missing_cells();
        let values = coords
            .iter()
            .map(|&(i, j)| prefilled.values.at(i, j))
            .collect();
        let index = coords
            .iter()
            .enumerate()
            .map(|(n, &c)| (c, n))
            .collect();
        Self {
            coords,
            values,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[(usize, usize)] {
        &self.coords
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn lookup(&self, row: usize, col: usize) -> Option<f64> {
        self.index.get(&(row, col)).map(|&n| self.values[n])
    }

    /// Indices of variables whose row appears in `rows`.
    pub fn in_rows(&self, rows: &[usize]) -> Vec<usize> {
        let rowset: std::collections::HashSet<usize> = rows.iter().copied().collect();
        (0..self.len())
            .filter(|&n| rowset.contains(&self.coords[n].0))
            .collect()
    }

    /// Write current variable values into the full data matrix.
    pub fn write_into(&self, x: &mut Matrix) {
        for (n, &(i, j)) in self.coords.iter().enumerate() {
            *x.at_mut(i, j) = self.values[n];
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.coords
            .iter()
            .zip(&self.values)
            .map(|(&(i, j), &v)| (i, j, v))
    }
}
