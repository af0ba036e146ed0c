//! Compressed-row complex operator assembled from Pauli strings.

use faer::{c64, Mat};
use rayon::prelude::*;

use crate::pauli::PauliString;

#[derive(Debug, Clone)]
pub struct SparseOperator {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<c64>,
}

impl SparseOperator {
    /// Sums `terms` on the `2^two_n` dimensional space, dropping exact zeros.
    pub fn from_pauli_strings(two_n: usize, terms: &[PauliString]) -> Self {
        let dim = 1usize << two_n;
        // Each string maps a basis state to exactly one basis state, so the
        // transpose is read off column by column.
        let rows: Vec<Vec<(usize, c64)>> = (0..dim)
            .into_par_iter()
            .map(|row| {
                let mut entries: Vec<(usize, c64)> = terms
                    .iter()
                    .map(|t| {
                        // <row| S |col> is nonzero for the unique col with S|col> ∝ |row>;
                        // strings are involutive up to phase, so col = S-image of row.
                        let (col, _) = t.apply(two_n, row);
                        let (back, amp) = t.apply(two_n, col);
                        debug_assert_eq!(back, row);
                        (col, amp)
                    })
                    .collect();
                entries.sort_by_key(|e| e.0);
                let mut merged: Vec<(usize, c64)> = Vec::with_capacity(entries.len());
                for (c, v) in entries {
                    match merged.last_mut() {
                        Some(last) if last.0 == c => last.1 += v,
                        _ => merged.push((c, v)),
                    }
                }
                merged.retain(|e| e.1.norm() > 1e-15);
                merged
            })
            .collect();
        let mut row_start = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_start.push(0);
        for r in rows {
            for (c, v) in r {
                cols.push(c);
                values.push(v);
            }
            row_start.push(cols.len());
        }
        Self {
            dim,
            row_start,
            cols,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn apply(&self, v: &[c64]) -> Vec<c64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .into_par_iter()
            .map(|r| {
                (self.row_start[r]..self.row_start[r + 1])
                    .map(|k| self.values[k] * v[self.cols[k]])
                    .sum()
            })
            .collect()
    }

    pub fn get(&self, row: usize, col: usize) -> c64 {
        let range = self.row_start[row]..self.row_start[row + 1];
        match self.cols[range.clone()].binary_search(&col) {
            Ok(k) => self.values[range.start + k],
            Err(_) => c64::new(0.0, 0.0),
        }
    }

    pub fn to_dense(&self) -> Mat<c64> {
        let mut m = Mat::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_start[r]..self.row_start[r + 1] {
                m[(r, self.cols[k])] = self.values[k];
            }
        }
        m
    }

    /// Iterator over `(row, col, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, c64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_start[r]..self.row_start[r + 1]).map(move |k| (r, self.cols[k], self.values[k]))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;

    #[test]
    fn matches_hand_built_xy_term() {
        // sigma^x_1 sigma^y_2 on two sites
        let s = PauliString::new(c64::new(1.0, 0.0), vec![(1, Pauli::X), (2, Pauli::Y)]);
        let op = SparseOperator::from_pauli_strings(2, &[s]);
        let m = op.to_dense();
        // |00> -> i|11>, |01> -> -i|10>, |10> -> i|01>, |11> -> -i|00>
        assert_eq!(m[(3, 0)], c64::new(0.0, 1.0));
        assert_eq!(m[(2, 1)], c64::new(0.0, -1.0));
        assert_eq!(m[(1, 2)], c64::new(0.0, 1.0));
        assert_eq!(m[(0, 3)], c64::new(0.0, -1.0));
        assert_eq!(op.nnz(), 4);
    }

    #[test]
    fn cancelling_terms_are_dropped() {
        let a = PauliString::new(c64::new(1.0, 0.0), vec![(1, Pauli::Z)]);
        let b = PauliString::new(c64::new(-1.0, 0.0), vec![(1, Pauli::Z)]);
        let op = SparseOperator::from_pauli_strings(2, &[a, b]);
        assert_eq!(op.nnz(), 0);
    }
}
