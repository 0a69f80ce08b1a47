use super::is_zero;
use crate::error::Violation;

/// Dense rank-3 tensor, linearized with the last mode fastest:
/// `values[(i0 * d1 + i1) * d2 + i2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor3 {
    pub dims: [usize; 3],
    pub values: Vec<f64>,
}

impl DenseTensor3 {
    pub fn zeros(dims: [usize; 3]) -> Self {
        DenseTensor3 {
            dims,
            values: vec![0.0; dims[0] * dims[1] * dims[2]],
        }
    }

    #[inline]
    pub fn lin(&self, idx: [usize; 3]) -> usize {
        (idx[0] * self.dims[1] + idx[1]) * self.dims[2] + idx[2]
    }

    #[inline]
    pub fn get(&self, idx: [usize; 3]) -> f64 {
        self.values[self.lin(idx)]
    }

    #[inline]
    pub fn set(&mut self, idx: [usize; 3], v: f64) {
        let at = self.lin(idx);
        self.values[at] = v;
    }

    pub fn nnz(&self) -> usize {
        self.values.iter().filter(|v| !is_zero(**v)).count()
    }

    /// Nonzeros in linearization order as ([i0, i1, i2], value).
    pub fn nonzeros(&self) -> impl Iterator<Item = ([usize; 3], f64)> + '_ {
        let [_, d1, d2] = self.dims;
        self.values.iter().enumerate().filter_map(move |(lin, &v)| {
            if is_zero(v) {
                None
            } else {
                let i2 = lin % d2;
                let i1 = (lin / d2) % d1;
                let i0 = lin / (d1 * d2);
                Some(([i0, i1, i2], v))
            }
        })
    }
}

/// Coordinate rank-3 tensor sorted lexicographically by (i0, i1, i2).
#[derive(Debug, Clone, PartialEq)]
pub struct CooTensor3 {
    pub dims: [usize; 3],
    pub coords: [Vec<usize>; 3],
    pub values: Vec<f64>,
}

impl CooTensor3 {
    pub fn from_dense(d: &DenseTensor3) -> Self {
        let mut coords = [Vec::new(), Vec::new(), Vec::new()];
        let mut values = Vec::new();
        for (idx, v) in d.nonzeros() {
            for m in 0..3 {
                coords[m].push(idx[m]);
            }
            values.push(v);
        }
        CooTensor3 {
            dims: d.dims,
            coords,
            values,
        }
    }

    pub fn from_sorted_entries(dims: [usize; 3], entries: Vec<([usize; 3], f64)>) -> Self {
        let mut coords = [Vec::new(), Vec::new(), Vec::new()];
        let mut values = Vec::with_capacity(entries.len());
        for (idx, v) in entries {
            for m in 0..3 {
                coords[m].push(idx[m]);
            }
            values.push(v);
        }
        CooTensor3 {
            dims,
            coords,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn entry(&self, n: usize) -> ([usize; 3], f64) {
        (
            [self.coords[0][n], self.coords[1][n], self.coords[2][n]],
            self.values[n],
        )
    }

    pub fn entries(&self) -> impl Iterator<Item = ([usize; 3], f64)> + '_ {
        (0..self.nnz()).map(|n| self.entry(n))
    }

    pub fn to_dense(&self) -> DenseTensor3 {
        let mut d = DenseTensor3::zeros(self.dims);
        for (idx, v) in self.entries() {
            d.set(idx, v);
        }
        d
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.coords.iter().any(|c| c.len() != self.values.len()) {
            out.push(Violation::new("coordinate and value arrays have equal length"));
            return out;
        }
        for n in 0..self.nnz() {
            let (idx, v) = self.entry(n);
            if (0..3).any(|m| idx[m] >= self.dims[m]) {
                out.push(Violation::at("coordinates lie inside the tensor shape", n));
            }
            if is_zero(v) {
                out.push(Violation::at("stored values are nonzero", n));
            }
            if n > 0 && self.entry(n - 1).0 >= idx {
                out.push(Violation::at(
                    "entries sorted by (i0, i1, i2) without duplicates",
                    n,
                ));
            }
        }
        out
    }
}

/// Zero-value compression for rank-3 tensors: presence bit per cell over the
/// dense linearization plus packed nonzero values.
#[derive(Debug, Clone, PartialEq)]
pub struct ZvcTensor3 {
    pub dims: [usize; 3],
    pub mask: Vec<bool>,
    pub values: Vec<f64>,
}

impl ZvcTensor3 {
    pub fn from_dense(d: &DenseTensor3) -> Self {
        let mut mask = Vec::with_capacity(d.values.len());
        let mut values = Vec::new();
        for &v in &d.values {
            let nz = !is_zero(v);
            mask.push(nz);
            if nz {
                values.push(v);
            }
        }
        ZvcTensor3 {
            dims: d.dims,
            mask,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn to_dense(&self) -> DenseTensor3 {
        let mut d = DenseTensor3::zeros(self.dims);
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
        if self.mask.len() != self.dims[0] * self.dims[1] * self.dims[2] {
            out.push(Violation::new("mask covers every cell"));
        }
        if self.mask.iter().filter(|b| **b).count() != self.values.len() {
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
