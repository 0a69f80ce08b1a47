use super::is_zero;

/// Row-major dense matrix of f64 scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    /// `values[i * cols + j]` holds element (i, j).
    pub values: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let m = rows.len();
        let k = rows.first().map_or(0, |r| r.len());
        let mut values = Vec::with_capacity(m * k);
        for r in rows {
            assert_eq!(r.len(), k, "ragged row in DenseMatrix::from_rows");
            values.extend_from_slice(r);
        }
        DenseMatrix {
            rows: m,
            cols: k,
            values,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn nnz(&self) -> usize {
        self.values.iter().filter(|v| !is_zero(**v)).count()
    }

    /// Nonzero entries in row-major order as (row, col, value).
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.values.iter().enumerate().filter_map(|(lin, &v)| {
            if is_zero(v) {
                None
            } else {
                Some((lin / self.cols, lin % self.cols, v))
            }
        })
    }
}
