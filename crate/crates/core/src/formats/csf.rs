use super::tensor::{CooTensor3, DenseTensor3};
use crate::error::{Error, Result, Violation};

/// Compressed sparse fiber for rank-3 tensors.
///
/// The nonzeros form a three-level tree. Level `l` indexes tensor mode
/// `mode_order[l]`; `idx0` lists the distinct top-level coordinates, `ptr0`
/// brackets each top node's children inside `idx1`, `ptr1` brackets each
/// middle node's leaves inside `idx2`, and `values` aligns with `idx2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsfTensor3 {
    pub dims: [usize; 3],
    pub mode_order: [usize; 3],
    pub idx0: Vec<usize>,
    pub ptr0: Vec<usize>,
    pub idx1: Vec<usize>,
    pub ptr1: Vec<usize>,
    pub idx2: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsfTensor3 {
    pub fn from_dense(d: &DenseTensor3, mode_order: [usize; 3]) -> Result<Self> {
        Self::from_entries(d.dims, mode_order, d.nonzeros().collect())
    }

    /// Build the tree from nonzero entries in original coordinate space
    /// (any order, no duplicates).
    pub fn from_entries(
        dims: [usize; 3],
        mode_order: [usize; 3],
        entries: Vec<([usize; 3], f64)>,
    ) -> Result<Self> {
        let mut sorted = mode_order;
        sorted.sort_unstable();
        if sorted != [0, 1, 2] {
            return Err(Error::InvalidConfig(format!(
                "mode order {mode_order:?} is not a permutation of [0, 1, 2]"
            )));
        }
        // Permute each nonzero into (level0, level1, level2) key order, then
        // sort lexicographically so equal prefixes become tree nodes.
        let mut entries: Vec<([usize; 3], f64)> = entries
            .into_iter()
            .map(|(idx, v)| {
                (
                    [idx[mode_order[0]], idx[mode_order[1]], idx[mode_order[2]]],
                    v,
                )
            })
            .collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));

        let mut t = CsfTensor3 {
            dims,
            mode_order,
            idx0: Vec::new(),
            ptr0: vec![0],
            idx1: Vec::new(),
            ptr1: vec![0],
            idx2: Vec::new(),
            values: Vec::new(),
        };
        for (key, v) in entries {
            let new_top = t.idx0.last() != Some(&key[0]) || t.idx0.is_empty();
            let new_mid = new_top || t.idx1.last() != Some(&key[1]) || t.idx1.is_empty();
            if new_top {
                t.idx0.push(key[0]);
                t.ptr0.push(t.idx1.len());
            }
            if new_mid {
                t.idx1.push(key[1]);
                t.ptr1.push(t.idx2.len());
                *t.ptr0.last_mut().unwrap() = t.idx1.len();
            }
            t.idx2.push(key[2]);
            t.values.push(v);
            *t.ptr1.last_mut().unwrap() = t.idx2.len();
        }
        Ok(t)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Nonzeros in original coordinate space, sorted by the permuted key.
    pub fn entries(&self) -> Vec<([usize; 3], f64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for (t, &i0) in self.idx0.iter().enumerate() {
            for m in self.ptr0[t]..self.ptr0[t + 1] {
                let i1 = self.idx1[m];
                for l in self.ptr1[m]..self.ptr1[m + 1] {
                    let key = [i0, i1, self.idx2[l]];
                    let mut idx = [0usize; 3];
                    for lvl in 0..3 {
                        idx[self.mode_order[lvl]] = key[lvl];
                    }
                    out.push((idx, self.values[l]));
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> DenseTensor3 {
        let mut d = DenseTensor3::zeros(self.dims);
        for (idx, v) in self.entries() {
            d.set(idx, v);
        }
        d
    }

    /// Decode to coordinate form (entries re-sorted into (i0, i1, i2) order).
    pub fn to_coo(&self) -> CooTensor3 {
        let mut entries = self.entries();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        CooTensor3::from_sorted_entries(self.dims, entries)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut sorted = self.mode_order;
        sorted.sort_unstable();
        if sorted != [0, 1, 2] {
            out.push(Violation::new("mode_order is a permutation of [0, 1, 2]"));
            return out;
        }
        if self.ptr0.len() != self.idx0.len() + 1 || self.ptr1.len() != self.idx1.len() + 1 {
            out.push(Violation::new("one pointer entry per node plus one"));
            return out;
        }
        if self.idx2.len() != self.values.len() {
            out.push(Violation::new("idx2 and values have equal length"));
            return out;
        }
        for (ptr, next_len, name) in [
            (&self.ptr0, self.idx1.len(), "ptr0"),
            (&self.ptr1, self.idx2.len(), "ptr1"),
        ] {
            if ptr.first() != Some(&0) {
                out.push(Violation::at("pointer arrays start at 0", 0));
            }
            for n in 1..ptr.len() {
                if ptr[n] <= ptr[n - 1] {
                    out.push(Violation::at(
                        "pointer arrays strictly increase (every node has a child)",
                        n,
                    ));
                }
            }
            if ptr.last() != Some(&next_len) {
                let _ = name;
                out.push(Violation::at(
                    "pointer arrays end at the next level's length",
                    ptr.len() - 1,
                ));
            }
        }
        if !out.is_empty() {
            return out;
        }
        let level_dims = [
            self.dims[self.mode_order[0]],
            self.dims[self.mode_order[1]],
            self.dims[self.mode_order[2]],
        ];
        for (n, &i) in self.idx0.iter().enumerate() {
            if i >= level_dims[0] {
                out.push(Violation::at("indices lie inside the tensor shape", n));
            }
            if n > 0 && self.idx0[n - 1] >= i {
                out.push(Violation::at("sibling indices strictly increase", n));
            }
        }
        for t in 0..self.idx0.len() {
            let sib = &self.idx1[self.ptr0[t]..self.ptr0[t + 1]];
            for (n, &i) in sib.iter().enumerate() {
                let at = self.ptr0[t] + n;
                if i >= level_dims[1] {
                    out.push(Violation::at("indices lie inside the tensor shape", at));
                }
                if n > 0 && sib[n - 1] >= i {
                    out.push(Violation::at("sibling indices strictly increase", at));
                }
            }
        }
        for m in 0..self.idx1.len() {
            let sib = &self.idx2[self.ptr1[m]..self.ptr1[m + 1]];
            for (n, &i) in sib.iter().enumerate() {
                let at = self.ptr1[m] + n;
                if i >= level_dims[2] {
                    out.push(Violation::at("indices lie inside the tensor shape", at));
                }
                if n > 0 && sib[n - 1] >= i {
                    out.push(Violation::at("sibling indices strictly increase", at));
                }
                if super::is_zero(self.values[at]) {
                    out.push(Violation::at("stored values are nonzero", at));
                }
            }
        }
        out
    }
}
