use super::{is_zero, DenseMatrix};
use crate::error::Violation;

/// Coordinate format: parallel (row, col, value) arrays sorted by (row, col).
#[derive(Debug, Clone, PartialEq)]
pub struct CooMatrix {
    pub rows: usize,
    pub cols: usize,
    pub row_ids: Vec<usize>,
    pub col_ids: Vec<usize>,
    pub values: Vec<f64>,
}

impl CooMatrix {
    pub fn from_dense(d: &DenseMatrix) -> Self {
        let mut row_ids = Vec::new();
        let mut col_ids = Vec::new();
        let mut values = Vec::new();
        for (i, j, v) in d.nonzeros() {
            row_ids.push(i);
            col_ids.push(j);
            values.push(v);
        }
        CooMatrix {
            rows: d.rows,
            cols: d.cols,
            row_ids,
            col_ids,
            values,
        }
    }

    /// Build from entries that are already sorted by (row, col) and free of
    /// duplicates and zeros; callers parsing external data should `validate`.
    pub fn from_sorted_entries(
        rows: usize,
        cols: usize,
        entries: Vec<(usize, usize, f64)>,
    ) -> Self {
        let mut row_ids = Vec::with_capacity(entries.len());
        let mut col_ids = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (i, j, v) in entries {
            row_ids.push(i);
            col_ids.push(j);
            values.push(v);
        }
        CooMatrix {
            rows,
            cols,
            row_ids,
            col_ids,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for n in 0..self.nnz() {
            d.set(self.row_ids[n], self.col_ids[n], self.values[n]);
        }
        d
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nnz()).map(|n| (self.row_ids[n], self.col_ids[n], self.values[n]))
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.row_ids.len() != self.values.len() || self.col_ids.len() != self.values.len() {
            out.push(Violation::new("row_ids, col_ids and values have equal length"));
            return out;
        }
        for n in 0..self.nnz() {
            if self.row_ids[n] >= self.rows || self.col_ids[n] >= self.cols {
                out.push(Violation::at("coordinates lie inside the matrix shape", n));
            }
            if is_zero(self.values[n]) {
                out.push(Violation::at("stored values are nonzero", n));
            }
            if n > 0 {
                let prev = (self.row_ids[n - 1], self.col_ids[n - 1]);
                let cur = (self.row_ids[n], self.col_ids[n]);
                if prev >= cur {
                    out.push(Violation::at(
                        "entries sorted by (row, col) without duplicates",
                        n,
                    ));
                }
            }
        }
        out
    }
}
