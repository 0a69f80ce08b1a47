use super::{is_zero, DenseMatrix};
use crate::error::Violation;

/// Zero-value compression: a one-bit presence mask over the row-major
/// linearization plus the nonzero values in linearization order.
#[derive(Debug, Clone, PartialEq)]
pub struct ZvcMatrix {
    pub rows: usize,
    pub cols: usize,
    pub mask: Vec<bool>,
    pub values: Vec<f64>,
}

impl ZvcMatrix {
    pub fn from_dense(d: &DenseMatrix) -> Self {
        let mut mask = Vec::with_capacity(d.values.len());
        let mut values = Vec::new();
        for &v in &d.values {
            let nz = !is_zero(v);
            mask.push(nz);
            if nz {
                values.push(v);
            }
        }
        ZvcMatrix {
            rows: d.rows,
            cols: d.cols,
            mask,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        let mut next = 0;
        for (lin, &set) in self.mask.iter().enumerate() {
            if set {
                d.values[lin] = self.values[next];
                next += 1;
            }
        }
        d
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.mask.len() != self.rows * self.cols {
            out.push(Violation::new("mask covers every cell"));
        }
        let set_bits = self.mask.iter().filter(|b| **b).count();
        if set_bits != self.values.len() {
            out.push(Violation::new("one stored value per set mask bit"));
        }
        for (n, v) in self.values.iter().enumerate() {
            if is_zero(*v) {
                out.push(Violation::at("stored values are nonzero", n));
            }
        }
        out
    }
}
