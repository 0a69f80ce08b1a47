use super::{is_zero, DenseMatrix};
use crate::error::Violation;

/// Compressed sparse column: the column-major mirror of CSR.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    pub rows: usize,
    pub cols: usize,
    pub col_ptr: Vec<usize>,
    pub row_ids: Vec<usize>,
    pub values: Vec<f64>,
}

impl CscMatrix {
    pub fn from_dense(d: &DenseMatrix) -> Self {
        let mut col_ptr = Vec::with_capacity(d.cols + 1);
        let mut row_ids = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for j in 0..d.cols {
            for i in 0..d.rows {
                let v = d.get(i, j);
                if !is_zero(v) {
                    row_ids.push(i);
                    values.push(v);
                }
            }
            col_ptr.push(row_ids.len());
        }
        CscMatrix {
            rows: d.rows,
            cols: d.cols,
            col_ptr,
            row_ids,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Row ids and values of column `j`.
    pub fn col(&self, j: usize) -> (&[usize], &[f64]) {
        let r = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_ids[r.clone()], &self.values[r])
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for j in 0..self.cols {
            let (rows, vals) = self.col(j);
            for (i, v) in rows.iter().zip(vals) {
                d.set(*i, j, *v);
            }
        }
        d
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.col_ptr.len() != self.cols + 1 {
            out.push(Violation::new("col_ptr has cols + 1 entries"));
            return out;
        }
        if self.row_ids.len() != self.values.len() {
            out.push(Violation::new("row_ids and values have equal length"));
            return out;
        }
        if self.col_ptr.first() != Some(&0) {
            out.push(Violation::at("col_ptr starts at 0", 0));
        }
        for j in 1..self.col_ptr.len() {
            if self.col_ptr[j] < self.col_ptr[j - 1] {
                out.push(Violation::at("col_ptr nondecreasing", j));
            }
        }
        if self.col_ptr.last() != Some(&self.nnz()) {
            out.push(Violation::at("col_ptr ends at nnz", self.cols));
        }
        if !out.is_empty() {
            return out;
        }
        for j in 0..self.cols {
            let (rows, vals) = self.col(j);
            for (n, (&i, &v)) in rows.iter().zip(vals).enumerate() {
                let at = self.col_ptr[j] + n;
                if i >= self.rows {
                    out.push(Violation::at("row ids lie inside the matrix shape", at));
                }
                if n > 0 && rows[n - 1] >= i {
                    out.push(Violation::at(
                        "row ids strictly increase within a column",
                        at,
                    ));
                }
                if is_zero(v) {
                    out.push(Violation::at("stored values are nonzero", at));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::super::testing::example_matrix;
    use super::*;

    #[test]
    fn example_encoding_matches_hand_derivation() {
        let c = CscMatrix::from_dense(&example_matrix());
        assert_eq!(c.col_ptr, vec![0, 1, 2, 3, 4]);
        assert_eq!(c.row_ids, vec![0, 2, 3, 0]);
        assert_eq!(c.values, vec![5.0, 3.0, 1.0, 7.0]);
        assert!(c.validate().is_empty());
        assert_eq!(c.to_dense(), example_matrix());
    }

    #[test]
    fn column_access_returns_slices() {
        let c = CscMatrix::from_dense(&example_matrix());
        let (rows, vals) = c.col(3);
        assert_eq!(rows, &[0]);
        assert_eq!(vals, &[7.0]);
    }
}
