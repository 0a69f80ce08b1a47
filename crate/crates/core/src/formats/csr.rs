use super::{is_zero, DenseMatrix};
use crate::error::Violation;

/// Compressed sparse row: `row_ptr[i]..row_ptr[i+1]` brackets the entries of
/// row `i` inside `col_ids` / `values`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub rows: usize,
    pub cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_ids: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_dense(d: &DenseMatrix) -> Self {
        let mut row_ptr = Vec::with_capacity(d.rows + 1);
        let mut col_ids = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..d.rows {
            for (j, &v) in d.row(i).iter().enumerate() {
                if !is_zero(v) {
                    col_ids.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_ids.len());
        }
        CsrMatrix {
            rows: d.rows,
            cols: d.cols,
            row_ptr,
            col_ids,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column ids and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_ids[r.clone()], &self.values[r])
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let (cols, vals) = self.row(i);
            for (j, v) in cols.iter().zip(vals) {
                d.set(i, *j, *v);
            }
        }
        d
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.row_ptr.len() != self.rows + 1 {
            out.push(Violation::new("row_ptr has rows + 1 entries"));
            return out;
        }
        if self.col_ids.len() != self.values.len() {
            out.push(Violation::new("col_ids and values have equal length"));
            return out;
        }
        if self.row_ptr.first() != Some(&0) {
            out.push(Violation::at("row_ptr starts at 0", 0));
        }
        for i in 1..self.row_ptr.len() {
            if self.row_ptr[i] < self.row_ptr[i - 1] {
                out.push(Violation::at("row_ptr nondecreasing", i));
            }
        }
        if self.row_ptr.last() != Some(&self.nnz()) {
            out.push(Violation::at("row_ptr ends at nnz", self.rows));
        }
        if !out.is_empty() {
            return out;
        }
        for i in 0..self.rows {
            let (cols, vals) = self.row(i);
            for (n, (&j, &v)) in cols.iter().zip(vals).enumerate() {
                let at = self.row_ptr[i] + n;
                if j >= self.cols {
                    out.push(Violation::at("column ids lie inside the matrix shape", at));
                }
                if n > 0 && cols[n - 1] >= j {
                    out.push(Violation::at("column ids strictly increase within a row", at));
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
        let c = CsrMatrix::from_dense(&example_matrix());
        assert_eq!(c.row_ptr, vec![0, 2, 2, 3, 4]);
        assert_eq!(c.col_ids, vec![0, 3, 1, 2]);
        assert_eq!(c.values, vec![5.0, 7.0, 3.0, 1.0]);
        assert!(c.validate().is_empty());
        assert_eq!(c.to_dense(), example_matrix());
    }

    #[test]
    fn decreasing_row_ptr_is_flagged() {
        let c = CsrMatrix {
            rows: 4,
            cols: 4,
            row_ptr: vec![0, 2, 1, 3, 4],
            col_ids: vec![0, 3, 1, 2],
            values: vec![5.0, 7.0, 3.0, 1.0],
        };
        let v = c.validate();
        assert!(v.iter().any(|x| x.invariant == "row_ptr nondecreasing" && x.index == Some(2)));
    }

    #[test]
    fn empty_matrix_has_all_zero_row_ptr() {
        let c = CsrMatrix::from_dense(&DenseMatrix::zeros(3, 3));
        assert_eq!(c.row_ptr, vec![0, 0, 0, 0]);
        assert_eq!(c.nnz(), 0);
        assert!(c.validate().is_empty());
    }
}
