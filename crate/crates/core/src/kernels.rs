//! Reference compute kernels.
//!
//! These are the functional oracles the rest of the crate is checked
//! against: plain dense GEMM, sparse-times-dense over coordinate entries,
//! matrix multiply with both operands walked in their native layouts, and
//! the two rank-3 tensor contractions (TTM over the last mode and MTTKRP).
//!
//! Every kernel fixes its loop order, so results are bit-deterministic for a
//! given operand pair; different traversals of the same data may differ by
//! floating-point rounding, which is why cross-kernel comparisons use a
//! relative tolerance.

use crate::error::{Error, Result};
use crate::formats::{
    CooMatrix, DenseMatrix, DenseTensor3, FormatId, FormattedMatrix, FormattedTensor3,
};

/// Dense matrix product with the contraction loop innermost.
pub fn gemm_dense(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "gemm: lhs is {}x{}, rhs is {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = DenseMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for j in 0..b.cols {
            let mut acc = 0.0;
            for k in 0..a.cols {
                acc += a.get(i, k) * b.get(k, j);
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Sparse-times-dense: every stored entry of `a` scales a full row of `b`.
pub fn spmm_coo(a: &CooMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "spmm: lhs is {}x{}, rhs is {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = DenseMatrix::zeros(a.rows, b.cols);
    for (i, k, v) in a.entries() {
        for j in 0..b.cols {
            let cur = out.get(i, j);
            out.set(i, j, cur + v * b.get(k, j));
        }
    }
    Ok(out)
}

fn kernel_format_err(f: FormatId) -> Error {
    Error::UnsupportedStreamFormat { format: f }
}

/// Matrix multiply where each operand is traversed in its own layout.
///
/// Supported operand formats: dense, coo, csr, csc. Row-major operands
/// (dense, coo, csr) drive row-slice accumulation; a csc left operand runs
/// column-major as an outer product over the shared dimension; a csc right
/// operand pairs with csr via sorted-index intersection and with the other
/// layouts via per-column accumulation.
pub fn matmul_acf(a: &FormattedMatrix, b: &FormattedMatrix) -> Result<DenseMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "matmul: lhs is {}x{}, rhs is {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let m = a.rows();
    let n = b.cols();
    let mut out = DenseMatrix::zeros(m, n);

    match b {
        FormattedMatrix::Dense(bd) => {
            for_each_lhs_entry(a, |i, k, av| {
                for (j, bv) in bd.row(k).iter().enumerate() {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + av * bv);
                }
            })?;
        }
        FormattedMatrix::Csr(bs) => {
            for_each_lhs_entry(a, |i, k, av| {
                let (cols, vals) = bs.row(k);
                for (j, bv) in cols.iter().zip(vals) {
                    let cur = out.get(i, *j);
                    out.set(i, *j, cur + av * bv);
                }
            })?;
        }
        FormattedMatrix::Csc(bs) => match a {
            FormattedMatrix::Csr(al) => {
                // Sorted-index intersection of a row of A with a column of B.
                for i in 0..m {
                    let (acols, avals) = al.row(i);
                    for j in 0..n {
                        let (brows, bvals) = bs.col(j);
                        let (mut p, mut q) = (0, 0);
                        let mut acc = 0.0;
                        while p < acols.len() && q < brows.len() {
                            match acols[p].cmp(&brows[q]) {
                                std::cmp::Ordering::Less => p += 1,
                                std::cmp::Ordering::Greater => q += 1,
                                std::cmp::Ordering::Equal => {
                                    acc += avals[p] * bvals[q];
                                    p += 1;
                                    q += 1;
                                }
                            }
                        }
                        if acc != 0.0 {
                            out.set(i, j, acc);
                        }
                    }
                }
            }
            FormattedMatrix::Dense(al) => {
                for j in 0..n {
                    let (brows, bvals) = bs.col(j);
                    for (k, bv) in brows.iter().zip(bvals) {
                        for i in 0..m {
                            let cur = out.get(i, j);
                            out.set(i, j, cur + al.get(i, *k) * bv);
                        }
                    }
                }
            }
            FormattedMatrix::Csc(al) => {
                for j in 0..n {
                    let (brows, bvals) = bs.col(j);
                    for (k, bv) in brows.iter().zip(bvals) {
                        let (arows, avals) = al.col(*k);
                        for (i, av) in arows.iter().zip(avals) {
                            let cur = out.get(*i, j);
                            out.set(*i, j, cur + av * bv);
                        }
                    }
                }
            }
            FormattedMatrix::Coo(al) => {
                // For each stored A entry, probe the sorted row ids of each
                // B column for the shared index.
                for (i, k, av) in al.entries() {
                    for j in 0..n {
                        let (brows, bvals) = bs.col(j);
                        if let Ok(at) = brows.binary_search(&k) {
                            let cur = out.get(i, j);
                            out.set(i, j, cur + av * bvals[at]);
                        }
                    }
                }
            }
            other => return Err(kernel_format_err(other.format())),
        },
        FormattedMatrix::Coo(bc) => {
            match a {
                FormattedMatrix::Dense(al) => {
                    for (k, j, bv) in bc.entries() {
                        for i in 0..m {
                            let cur = out.get(i, j);
                            out.set(i, j, cur + al.get(i, k) * bv);
                        }
                    }
                }
                FormattedMatrix::Csc(al) => {
                    for (k, j, bv) in bc.entries() {
                        let (arows, avals) = al.col(k);
                        for (i, av) in arows.iter().zip(avals) {
                            let cur = out.get(*i, j);
                            out.set(*i, j, cur + av * bv);
                        }
                    }
                }
                FormattedMatrix::Csr(_) | FormattedMatrix::Coo(_) => {
                    // B's entries are sorted by row, so row k of B is the
                    // contiguous segment found by bisecting row_ids.
                    for_each_lhs_entry(a, |i, k, av| {
                        let lo = bc.row_ids.partition_point(|r| *r < k);
                        let hi = bc.row_ids.partition_point(|r| *r <= k);
                        for t in lo..hi {
                            let j = bc.col_ids[t];
                            let cur = out.get(i, j);
                            out.set(i, j, cur + av * bc.values[t]);
                        }
                    })?;
                }
                other => return Err(kernel_format_err(other.format())),
            }
        }
        other => return Err(kernel_format_err(other.format())),
    }
    Ok(out)
}

/// Visit the stored entries of a left operand in its native order.
fn for_each_lhs_entry<F: FnMut(usize, usize, f64)>(
    a: &FormattedMatrix,
    mut f: F,
) -> Result<()> {
    match a {
        FormattedMatrix::Dense(d) => {
            for (i, k, v) in d.nonzeros() {
                f(i, k, v);
            }
        }
        FormattedMatrix::Coo(c) => {
            for (i, k, v) in c.entries() {
                f(i, k, v);
            }
        }
        FormattedMatrix::Csr(c) => {
            for i in 0..c.rows {
                let (cols, vals) = c.row(i);
                for (k, v) in cols.iter().zip(vals) {
                    f(i, *k, *v);
                }
            }
        }
        FormattedMatrix::Csc(c) => {
            for k in 0..c.cols {
                let (rows, vals) = c.col(k);
                for (i, v) in rows.iter().zip(vals) {
                    f(*i, k, *v);
                }
            }
        }
        other => return Err(kernel_format_err(other.format())),
    }
    Ok(())
}

/// Stored entries of a tensor in its native traversal order.
pub fn tensor_entries(t: &FormattedTensor3) -> Vec<([usize; 3], f64)> {
    match t {
        FormattedTensor3::Dense(d) => d.nonzeros().collect(),
        FormattedTensor3::Coo(c) => c.entries().collect(),
        FormattedTensor3::Zvc(z) => z.to_dense().nonzeros().collect(),
        FormattedTensor3::Csf(c) => c.entries(),
    }
}

/// Tensor-times-matrix over the last mode:
/// `out[i][j][f] = sum_k a[i][j][k] * b[k][f]`.
pub fn spttm(a: &FormattedTensor3, b: &DenseMatrix) -> Result<DenseTensor3> {
    let [d0, d1, d2] = a.dims();
    if d2 != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "spttm: tensor mode 2 is {}, matrix has {} rows",
            d2, b.rows
        )));
    }
    let f_dim = b.cols;
    let mut out = DenseTensor3::zeros([d0, d1, f_dim]);
    for ([i, j, k], v) in tensor_entries(a) {
        for f in 0..f_dim {
            let cur = out.get([i, j, f]);
            out.set([i, j, f], cur + v * b.get(k, f));
        }
    }
    Ok(out)
}

/// Matricized tensor times Khatri-Rao product:
/// `out[i][f] = sum_j sum_k a[i][j][k] * b[j][f] * c[k][f]`.
pub fn mttkrp(a: &FormattedTensor3, b: &DenseMatrix, c: &DenseMatrix) -> Result<DenseMatrix> {
    let [d0, d1, d2] = a.dims();
    if d1 != b.rows || d2 != c.rows || b.cols != c.cols {
        return Err(Error::DimensionMismatch(format!(
            "mttkrp: tensor is {d0}x{d1}x{d2}, factors are {}x{} and {}x{}",
            b.rows, b.cols, c.rows, c.cols
        )));
    }
    let f_dim = b.cols;
    let mut out = DenseMatrix::zeros(d0, f_dim);
    for ([i, j, k], v) in tensor_entries(a) {
        for f in 0..f_dim {
            let cur = out.get(i, f);
            out.set(i, f, cur + v * b.get(j, f) * c.get(k, f));
        }
    }
    Ok(out)
}

/// Dense references for the tensor kernels, used as test oracles.
pub fn spttm_dense_oracle(a: &DenseTensor3, b: &DenseMatrix) -> Result<DenseTensor3> {
    let [d0, d1, d2] = a.dims;
    if d2 != b.rows {
        return Err(Error::DimensionMismatch("spttm oracle shape".into()));
    }
    let mut out = DenseTensor3::zeros([d0, d1, b.cols]);
    for i in 0..d0 {
        for j in 0..d1 {
            for f in 0..b.cols {
                let mut acc = 0.0;
                for k in 0..d2 {
                    acc += a.get([i, j, k]) * b.get(k, f);
                }
                out.set([i, j, f], acc);
            }
        }
    }
    Ok(out)
}

pub fn mttkrp_dense_oracle(
    a: &DenseTensor3,
    b: &DenseMatrix,
    c: &DenseMatrix,
) -> Result<DenseMatrix> {
    let [d0, d1, d2] = a.dims;
    if d1 != b.rows || d2 != c.rows || b.cols != c.cols {
        return Err(Error::DimensionMismatch("mttkrp oracle shape".into()));
    }
    let mut out = DenseMatrix::zeros(d0, b.cols);
    for i in 0..d0 {
        for f in 0..b.cols {
            let mut acc = 0.0;
            for j in 0..d1 {
                for k in 0..d2 {
                    acc += a.get([i, j, k]) * b.get(j, f) * c.get(k, f);
                }
            }
            out.set(i, f, acc);
        }
    }
    Ok(out)
}
