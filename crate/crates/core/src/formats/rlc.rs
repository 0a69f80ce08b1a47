use super::{is_zero, DenseMatrix};
use crate::error::{Error, Result, Violation};

/// Run-length compression over the row-major linearization.
///
/// Each pair records the number of zeros preceding a stored value; runs span
/// row boundaries and trailing zeros after the last nonzero are implicit.
/// A zero gap longer than the run field can hold is escaped with filler pairs
/// `(2^run_bits - 1, 0.0)`; the filler's zero value occupies one linear
/// position, so each filler absorbs `2^run_bits` zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct RlcMatrix {
    pub rows: usize,
    pub cols: usize,
    pub run_bits: u32,
    /// (zero-run, value) pairs in linearization order.
    pub pairs: Vec<(u64, f64)>,
}

impl RlcMatrix {
    pub fn from_dense(d: &DenseMatrix, run_bits: u32) -> Result<Self> {
        if run_bits == 0 || run_bits > 32 {
            return Err(Error::InvalidConfig(format!(
                "run field width must be in 1..=32, got {run_bits}"
            )));
        }
        let max_run = (1u64 << run_bits) - 1;
        let mut pairs = Vec::new();
        let mut gap: u64 = 0;
        for &v in &d.values {
            if is_zero(v) {
                gap += 1;
            } else {
                while gap > max_run {
                    pairs.push((max_run, 0.0));
                    gap -= max_run + 1;
                }
                pairs.push((gap, v));
                gap = 0;
            }
        }
        Ok(RlcMatrix {
            rows: d.rows,
            cols: d.cols,
            run_bits,
            pairs,
        })
    }

    pub fn max_run(&self) -> u64 {
        (1u64 << self.run_bits) - 1
    }

    /// Logical nonzeros: pairs minus escape fillers.
    pub fn nnz(&self) -> usize {
        self.pairs.iter().filter(|(_, v)| !is_zero(*v)).count()
    }

    /// Stored pairs including escape fillers.
    pub fn n_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// Linear position occupied by each pair's value slot.
    pub fn linear_positions(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.pairs.len());
        let mut pos: u64 = 0;
        for (n, (run, _)) in self.pairs.iter().enumerate() {
            pos += run + if n == 0 { 0 } else { 1 };
            out.push(pos);
        }
        out
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for (pos, (_, v)) in self.linear_positions().into_iter().zip(&self.pairs) {
            if !is_zero(*v) {
                let lin = pos as usize;
                d.values[lin] = *v;
            }
        }
        d
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let cells = (self.rows as u64) * (self.cols as u64);
        let max_run = self.max_run();
        let positions = self.linear_positions();
        for (n, ((run, v), pos)) in self.pairs.iter().zip(&positions).enumerate() {
            if *run > max_run {
                out.push(Violation::at("runs fit in the run field", n));
            }
            if is_zero(*v) && *run != max_run {
                out.push(Violation::at(
                    "zero values appear only in max-run escape fillers",
                    n,
                ));
            }
            if *pos >= cells {
                out.push(Violation::at("pairs stay inside the linearization", n));
            }
        }
        if let Some((_, v)) = self.pairs.last() {
            if is_zero(*v) {
                out.push(Violation::at(
                    "the final pair stores a nonzero (trailing zeros are implicit)",
                    self.pairs.len() - 1,
                ));
            }
        }
        out
    }
}
