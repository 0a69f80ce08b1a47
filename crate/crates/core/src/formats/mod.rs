//! Lossless sparse storage formats.
//!
//! Matrix formats (row index `i` in `0..m`, column index `j` in `0..k`):
//!
//! | id    | layout                                                    |
//! |-------|-----------------------------------------------------------|
//! | dense | row-major scalars, zeros stored                           |
//! | coo   | (row, col, value) triples sorted by (row, col)            |
//! | csr   | row pointer array + column ids + values                   |
//! | csc   | column pointer array + row ids + values                   |
//! | bsr   | dense R x C blocks addressed like CSR over block rows     |
//! | rlc   | (zero-run, value) pairs over the row-major linearization  |
//! | zvc   | one presence bit per cell + packed nonzero values         |
//!
//! Rank-3 tensor formats: dense, coo and zvc extend the matrix layouts with a
//! third index; csf stores the nonzeros as a three-level tree with one index
//! and one pointer array per level.
//!
//! Every compressed type encodes from and decodes to its dense counterpart
//! exactly: values are moved, never recomputed, so round-trips preserve every
//! bit of every nonzero scalar.

mod bsr;
mod coo;
mod csc;
mod csf;
mod csr;
mod dense;
mod rlc;
mod tensor;
mod zvc;

pub use bsr::BsrMatrix;
pub use coo::CooMatrix;
pub use csc::CscMatrix;
pub use csf::CsfTensor3;
pub use csr::CsrMatrix;
pub use dense::DenseMatrix;
pub use rlc::RlcMatrix;
pub use tensor::{CooTensor3, DenseTensor3, ZvcTensor3};
pub use zvc::ZvcMatrix;

use crate::error::{Error, Result, Violation};

/// Identifies a storage format independent of rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FormatId {
    Dense,
    Coo,
    Csr,
    Csc,
    Bsr,
    Rlc,
    Zvc,
    Csf,
}

impl FormatId {
    /// All formats applicable to matrices.
    pub const MATRIX: [FormatId; 7] = [
        FormatId::Dense,
        FormatId::Coo,
        FormatId::Csr,
        FormatId::Csc,
        FormatId::Bsr,
        FormatId::Rlc,
        FormatId::Zvc,
    ];

    /// All formats applicable to rank-3 tensors.
    pub const TENSOR3: [FormatId; 4] = [FormatId::Dense, FormatId::Coo, FormatId::Zvc, FormatId::Csf];

    pub fn is_matrix_format(self) -> bool {
        Self::MATRIX.contains(&self)
    }

    pub fn is_tensor3_format(self) -> bool {
        Self::TENSOR3.contains(&self)
    }

    pub fn name(self) -> &'static str {
        match self {
            FormatId::Dense => "dense",
            FormatId::Coo => "coo",
            FormatId::Csr => "csr",
            FormatId::Csc => "csc",
            FormatId::Bsr => "bsr",
            FormatId::Rlc => "rlc",
            FormatId::Zvc => "zvc",
            FormatId::Csf => "csf",
        }
    }

    pub fn parse(s: &str) -> Result<FormatId> {
        match s.to_ascii_lowercase().as_str() {
            "dense" => Ok(FormatId::Dense),
            "coo" => Ok(FormatId::Coo),
            "csr" => Ok(FormatId::Csr),
            "csc" => Ok(FormatId::Csc),
            "bsr" => Ok(FormatId::Bsr),
            "rlc" => Ok(FormatId::Rlc),
            "zvc" => Ok(FormatId::Zvc),
            "csf" => Ok(FormatId::Csf),
            other => Err(Error::InvalidConfig(format!("unknown format `{other}`"))),
        }
    }
}

impl std::fmt::Display for FormatId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Encoding parameters for the formats that need them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeParams {
    /// BSR block height and width.
    pub block: (usize, usize),
    /// RLC zero-run field width in bits.
    pub run_bits: u32,
    /// CSF level-to-mode assignment; `[0, 1, 2]` keeps the natural order.
    pub mode_order: [usize; 3],
}

impl Default for EncodeParams {
    fn default() -> Self {
        EncodeParams {
            block: (4, 4),
            run_bits: 4,
            mode_order: [0, 1, 2],
        }
    }
}

/// A matrix held in any of the supported formats.
#[derive(Debug, Clone, PartialEq)]
pub enum FormattedMatrix {
    Dense(DenseMatrix),
    Coo(CooMatrix),
    Csr(CsrMatrix),
    Csc(CscMatrix),
    Bsr(BsrMatrix),
    Rlc(RlcMatrix),
    Zvc(ZvcMatrix),
}

impl FormattedMatrix {
    pub fn format(&self) -> FormatId {
        match self {
            FormattedMatrix::Dense(_) => FormatId::Dense,
            FormattedMatrix::Coo(_) => FormatId::Coo,
            FormattedMatrix::Csr(_) => FormatId::Csr,
            FormattedMatrix::Csc(_) => FormatId::Csc,
            FormattedMatrix::Bsr(_) => FormatId::Bsr,
            FormattedMatrix::Rlc(_) => FormatId::Rlc,
            FormattedMatrix::Zvc(_) => FormatId::Zvc,
        }
    }

    pub fn rows(&self) -> usize {
        match self {
            FormattedMatrix::Dense(x) => x.rows,
            FormattedMatrix::Coo(x) => x.rows,
            FormattedMatrix::Csr(x) => x.rows,
            FormattedMatrix::Csc(x) => x.rows,
            FormattedMatrix::Bsr(x) => x.rows,
            FormattedMatrix::Rlc(x) => x.rows,
            FormattedMatrix::Zvc(x) => x.rows,
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            FormattedMatrix::Dense(x) => x.cols,
            FormattedMatrix::Coo(x) => x.cols,
            FormattedMatrix::Csr(x) => x.cols,
            FormattedMatrix::Csc(x) => x.cols,
            FormattedMatrix::Bsr(x) => x.cols,
            FormattedMatrix::Rlc(x) => x.cols,
            FormattedMatrix::Zvc(x) => x.cols,
        }
    }

    /// Number of logical nonzeros (explicit zeros inside BSR blocks and RLC
    /// escape fillers do not count).
    pub fn nnz(&self) -> usize {
        match self {
            FormattedMatrix::Dense(x) => x.nnz(),
            FormattedMatrix::Coo(x) => x.nnz(),
            FormattedMatrix::Csr(x) => x.nnz(),
            FormattedMatrix::Csc(x) => x.nnz(),
            FormattedMatrix::Bsr(x) => x.nnz(),
            FormattedMatrix::Rlc(x) => x.nnz(),
            FormattedMatrix::Zvc(x) => x.nnz(),
        }
    }

    /// nnz / (rows * cols); 0.0 for degenerate empty shapes.
    pub fn density(&self) -> f64 {
        let cells = self.rows() as f64 * self.cols() as f64;
        if cells == 0.0 {
            0.0
        } else {
            self.nnz() as f64 / cells
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            FormattedMatrix::Dense(x) => x.clone(),
            FormattedMatrix::Coo(x) => x.to_dense(),
            FormattedMatrix::Csr(x) => x.to_dense(),
            FormattedMatrix::Csc(x) => x.to_dense(),
            FormattedMatrix::Bsr(x) => x.to_dense(),
            FormattedMatrix::Rlc(x) => x.to_dense(),
            FormattedMatrix::Zvc(x) => x.to_dense(),
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        match self {
            FormattedMatrix::Dense(_) => Vec::new(),
            FormattedMatrix::Coo(x) => x.validate(),
            FormattedMatrix::Csr(x) => x.validate(),
            FormattedMatrix::Csc(x) => x.validate(),
            FormattedMatrix::Bsr(x) => x.validate(),
            FormattedMatrix::Rlc(x) => x.validate(),
            FormattedMatrix::Zvc(x) => x.validate(),
        }
    }
}

/// Encode a dense matrix into `format`.
pub fn from_dense_matrix(
    d: &DenseMatrix,
    format: FormatId,
    params: &EncodeParams,
) -> Result<FormattedMatrix> {
    match format {
        FormatId::Dense => Ok(FormattedMatrix::Dense(d.clone())),
        FormatId::Coo => Ok(FormattedMatrix::Coo(CooMatrix::from_dense(d))),
        FormatId::Csr => Ok(FormattedMatrix::Csr(CsrMatrix::from_dense(d))),
        FormatId::Csc => Ok(FormattedMatrix::Csc(CscMatrix::from_dense(d))),
        FormatId::Bsr => Ok(FormattedMatrix::Bsr(BsrMatrix::from_dense(
            d,
            params.block.0,
            params.block.1,
        )?)),
        FormatId::Rlc => Ok(FormattedMatrix::Rlc(RlcMatrix::from_dense(
            d,
            params.run_bits,
        )?)),
        FormatId::Zvc => Ok(FormattedMatrix::Zvc(ZvcMatrix::from_dense(d))),
        FormatId::Csf => Err(Error::NotAMatrixFormat(FormatId::Csf)),
    }
}

/// A rank-3 tensor held in any of the supported formats.
#[derive(Debug, Clone, PartialEq)]
pub enum FormattedTensor3 {
    Dense(DenseTensor3),
    Coo(CooTensor3),
    Zvc(ZvcTensor3),
    Csf(CsfTensor3),
}

impl FormattedTensor3 {
    pub fn format(&self) -> FormatId {
        match self {
            FormattedTensor3::Dense(_) => FormatId::Dense,
            FormattedTensor3::Coo(_) => FormatId::Coo,
            FormattedTensor3::Zvc(_) => FormatId::Zvc,
            FormattedTensor3::Csf(_) => FormatId::Csf,
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        match self {
            FormattedTensor3::Dense(x) => x.dims,
            FormattedTensor3::Coo(x) => x.dims,
            FormattedTensor3::Zvc(x) => x.dims,
            FormattedTensor3::Csf(x) => x.dims,
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            FormattedTensor3::Dense(x) => x.nnz(),
            FormattedTensor3::Coo(x) => x.nnz(),
            FormattedTensor3::Zvc(x) => x.nnz(),
            FormattedTensor3::Csf(x) => x.nnz(),
        }
    }

    pub fn density(&self) -> f64 {
        let [d0, d1, d2] = self.dims();
        let cells = d0 as f64 * d1 as f64 * d2 as f64;
        if cells == 0.0 {
            0.0
        } else {
            self.nnz() as f64 / cells
        }
    }

    pub fn to_dense(&self) -> DenseTensor3 {
        match self {
            FormattedTensor3::Dense(x) => x.clone(),
            FormattedTensor3::Coo(x) => x.to_dense(),
            FormattedTensor3::Zvc(x) => x.to_dense(),
            FormattedTensor3::Csf(x) => x.to_dense(),
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        match self {
            FormattedTensor3::Dense(_) => Vec::new(),
            FormattedTensor3::Coo(x) => x.validate(),
            FormattedTensor3::Zvc(x) => x.validate(),
            FormattedTensor3::Csf(x) => x.validate(),
        }
    }
}

/// Encode a dense rank-3 tensor into `format`.
pub fn from_dense_tensor3(
    d: &DenseTensor3,
    format: FormatId,
    params: &EncodeParams,
) -> Result<FormattedTensor3> {
    match format {
        FormatId::Dense => Ok(FormattedTensor3::Dense(d.clone())),
        FormatId::Coo => Ok(FormattedTensor3::Coo(CooTensor3::from_dense(d))),
        FormatId::Zvc => Ok(FormattedTensor3::Zvc(ZvcTensor3::from_dense(d))),
        FormatId::Csf => Ok(FormattedTensor3::Csf(CsfTensor3::from_dense(
            d,
            params.mode_order,
        )?)),
        other => Err(Error::NotATensorFormat(other)),
    }
}

pub(crate) fn is_zero(v: f64) -> bool {
    v == 0.0
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;

    /// The 4x4 matrix used as a worked example throughout the crate:
    /// nonzeros (0,0)=5, (0,3)=7, (2,1)=3, (3,2)=1.
    pub fn example_matrix() -> DenseMatrix {
        let mut d = DenseMatrix::zeros(4, 4);
        d.set(0, 0, 5.0);
        d.set(0, 3, 7.0);
        d.set(2, 1, 3.0);
        d.set(3, 2, 1.0);
        d
    }

    /// The 2x2x2 tensor with (0,0,0)=2, (0,1,1)=3, (1,0,1)=4.
    pub fn example_tensor() -> DenseTensor3 {
        let mut t = DenseTensor3::zeros([2, 2, 2]);
        t.set([0, 0, 0], 2.0);
        t.set([0, 1, 1], 3.0);
        t.set([1, 0, 1], 4.0);
        t
    }
}
