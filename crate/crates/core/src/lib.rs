//! Sparse matrix and tensor toolkit: compression formats, reference compute
//! kernels, a hardware format-conversion engine with cycle and energy
//! estimates, storage and streaming cost models for a weight-stationary
//! accelerator, and a recommender that picks memory and compute formats to
//! minimize energy-delay product.

pub mod cost;
pub mod error;
pub mod formats;
pub mod io;
pub mod kernels;
pub mod mint;
pub mod perf;
pub mod sage;
pub mod synth;

pub use error::{Error, Result};
pub use formats::{
    from_dense_matrix, from_dense_tensor3, BsrMatrix, CooMatrix, CooTensor3, CscMatrix,
    CsfTensor3, CsrMatrix, DenseMatrix, DenseTensor3, EncodeParams, FormatId, FormattedMatrix,
    FormattedTensor3, RlcMatrix, ZvcMatrix, ZvcTensor3,
};
