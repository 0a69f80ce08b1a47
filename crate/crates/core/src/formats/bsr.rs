use super::{is_zero, DenseMatrix};
use crate::error::{Error, Result, Violation};

/// Block sparse row: CSR over fixed R x C blocks.
///
/// A block is stored exactly when it contains at least one nonzero; its
/// unused positions hold explicit zeros. Blocks that fall partly outside the
/// matrix (when the shape is not a multiple of the block shape) are padded
/// with zeros, and the padding is discarded on decode.
#[derive(Debug, Clone, PartialEq)]
pub struct BsrMatrix {
    pub rows: usize,
    pub cols: usize,
    pub block_rows: usize,
    pub block_cols: usize,
    pub block_row_ptr: Vec<usize>,
    pub block_col_ids: Vec<usize>,
    /// Concatenated row-major R x C blocks, one per stored block.
    pub block_values: Vec<f64>,
}

impl BsrMatrix {
    pub fn from_dense(d: &DenseMatrix, block_rows: usize, block_cols: usize) -> Result<Self> {
        if block_rows == 0 || block_cols == 0 {
            return Err(Error::InvalidConfig(
                "block dimensions must be positive".into(),
            ));
        }
        let grid_rows = d.rows.div_ceil(block_rows);
        let grid_cols = d.cols.div_ceil(block_cols);
        let mut block_row_ptr = Vec::with_capacity(grid_rows + 1);
        let mut block_col_ids = Vec::new();
        let mut block_values = Vec::new();
        block_row_ptr.push(0);
        for bi in 0..grid_rows {
            for bj in 0..grid_cols {
                let mut block = vec![0.0; block_rows * block_cols];
                let mut occupied = false;
                for r in 0..block_rows {
                    let i = bi * block_rows + r;
                    if i >= d.rows {
                        break;
                    }
                    for c in 0..block_cols {
                        let j = bj * block_cols + c;
                        if j >= d.cols {
                            break;
                        }
                        let v = d.get(i, j);
                        if !is_zero(v) {
                            occupied = true;
                        }
                        block[r * block_cols + c] = v;
                    }
                }
                if occupied {
                    block_col_ids.push(bj);
                    block_values.extend_from_slice(&block);
                }
            }
            block_row_ptr.push(block_col_ids.len());
        }
        Ok(BsrMatrix {
            rows: d.rows,
            cols: d.cols,
            block_rows,
            block_cols,
            block_row_ptr,
            block_col_ids,
            block_values,
        })
    }

    /// Number of stored blocks.
    pub fn n_blocks(&self) -> usize {
        self.block_col_ids.len()
    }

    /// Logical nonzeros (explicit zeros inside blocks do not count).
    pub fn nnz(&self) -> usize {
        self.block_values.iter().filter(|v| !is_zero(**v)).count()
    }

    pub fn block(&self, n: usize) -> &[f64] {
        let sz = self.block_rows * self.block_cols;
        &self.block_values[n * sz..(n + 1) * sz]
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        let grid_rows = self.rows.div_ceil(self.block_rows);
        for bi in 0..grid_rows {
            for n in self.block_row_ptr[bi]..self.block_row_ptr[bi + 1] {
                let bj = self.block_col_ids[n];
                let block = self.block(n);
                for r in 0..self.block_rows {
                    let i = bi * self.block_rows + r;
                    if i >= self.rows {
                        break;
                    }
                    for c in 0..self.block_cols {
                        let j = bj * self.block_cols + c;
                        if j >= self.cols {
                            break;
                        }
                        d.set(i, j, block[r * self.block_cols + c]);
                    }
                }
            }
        }
        d
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let grid_rows = self.rows.div_ceil(self.block_rows.max(1));
        let grid_cols = self.cols.div_ceil(self.block_cols.max(1));
        if self.block_rows == 0 || self.block_cols == 0 {
            out.push(Violation::new("block dimensions are positive"));
            return out;
        }
        if self.block_row_ptr.len() != grid_rows + 1 {
            out.push(Violation::new("block_row_ptr has one entry per block row plus one"));
            return out;
        }
        if self.block_values.len() != self.n_blocks() * self.block_rows * self.block_cols {
            out.push(Violation::new("block_values holds one full block per stored block"));
            return out;
        }
        if self.block_row_ptr.first() != Some(&0) {
            out.push(Violation::at("block_row_ptr starts at 0", 0));
        }
        for i in 1..self.block_row_ptr.len() {
            if self.block_row_ptr[i] < self.block_row_ptr[i - 1] {
                out.push(Violation::at("block_row_ptr nondecreasing", i));
            }
        }
        if self.block_row_ptr.last() != Some(&self.n_blocks()) {
            out.push(Violation::at("block_row_ptr ends at the block count", grid_rows));
        }
        if !out.is_empty() {
            return out;
        }
        for bi in 0..grid_rows {
            let ids = &self.block_col_ids[self.block_row_ptr[bi]..self.block_row_ptr[bi + 1]];
            for (n, &bj) in ids.iter().enumerate() {
                let at = self.block_row_ptr[bi] + n;
                if bj >= grid_cols {
                    out.push(Violation::at("block column ids lie inside the block grid", at));
                }
                if n > 0 && ids[n - 1] >= bj {
                    out.push(Violation::at(
                        "block column ids strictly increase within a block row",
                        at,
                    ));
                }
            }
        }
        for n in 0..self.n_blocks() {
            if self.block(n).iter().all(|v| is_zero(*v)) {
                out.push(Violation::at("stored blocks contain at least one nonzero", n));
            }
        }
        out
    }
}
