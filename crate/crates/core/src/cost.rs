//! Storage-bit accounting, DRAM transfer cost, and the shared hardware
//! description consumed by the conversion and performance models.
//!
//! Bit formulas follow one convention: a matrix stores `nnz` values of
//! `dtype_bits` each (the data) plus whatever indices, pointers, masks, or
//! run fields the format needs (the metadata). Index fields are sized to
//! address their dimension, pointer fields to address `nnz + 1` positions.

use crate::error::{Error, Result};
use crate::formats::{EncodeParams, FormatId, FormattedMatrix, FormattedTensor3};

/// Width in bits of an index field addressing `0..d`; never below one bit.
pub fn index_bits(d: usize) -> u32 {
    ceil_log2(d.max(2))
}

/// Width in bits of a pointer field for an array of `nnz` entries. The +2
/// keeps the width defined (and ≥ 1) for empty operands.
pub fn pointer_bits(nnz: usize) -> u32 {
    ceil_log2(nnz + 2)
}

pub(crate) fn ceil_log2(x: usize) -> u32 {
    debug_assert!(x >= 1);
    usize::BITS - (x - 1).leading_zeros()
}

/// Which of the converter's hardware variants is installed: standalone
/// blocks, blocks merged across conversion paths, or merged blocks that
/// also reuse the host accelerator's adders and dividers. Variants share
/// one cycle model and differ only in a per-op energy factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MintVariant {
    #[default]
    Baseline,
    Merged,
    MergedReuse,
}

impl MintVariant {
    pub fn energy_factor(self) -> f64 {
        match self {
            MintVariant::Baseline => 1.0,
            MintVariant::Merged => 0.45,
            MintVariant::MergedReuse => 0.25,
        }
    }
}

/// Prefix-sum adder topology installed in the converter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrefixVariant {
    /// One adder per lane chained serially; cheapest, longest fill.
    SerialChain,
    /// Balanced up/down sweep tree; minimal adder count, two log-depth
    /// passes per batch.
    WorkEfficient,
    /// Log-depth all-lanes network; one batch per cycle.
    #[default]
    HighlyParallel,
}

/// Accelerator and converter parameters shared by every model in the crate.
/// Energies are relative units anchored so a 32-bit DRAM word costs 6400
/// times a MAC.
#[derive(Debug, Clone, PartialEq)]
pub struct HardwareConfig {
    pub n_pe: usize,
    pub bus_elems_per_cycle: usize,
    pub pe_buffer_elems: usize,
    pub vector_lanes: usize,
    pub dtype_bits: u32,
    pub dram_bits_per_cycle: usize,
    pub e_dram_per_bit: f64,
    pub e_mac: f64,
    pub e_buf_access: f64,
    pub e_stream_elem: f64,
    pub e_conv_op: f64,
    pub div_mod_lanes: usize,
    pub prefix_width: usize,
    pub sorter_width: usize,
    pub run_bits: u32,
    /// Bus/buffer width of one metadata element relative to a data element.
    pub meta_width_ratio: f64,
    /// When true, format conversion overlaps with the DRAM transfer it
    /// consumes, so only the slower of the two contributes cycles.
    pub overlap_conversion: bool,
    pub prefix_variant: PrefixVariant,
    pub mint_variant: MintVariant,
}

impl Default for HardwareConfig {
    fn default() -> Self {
        HardwareConfig {
            n_pe: 2048,
            bus_elems_per_cycle: 16,
            pe_buffer_elems: 128,
            vector_lanes: 8,
            dtype_bits: 32,
            dram_bits_per_cycle: 512,
            e_dram_per_bit: 200.0,
            e_mac: 1.0,
            e_buf_access: 2.0,
            e_stream_elem: 2.0,
            e_conv_op: 1.0,
            div_mod_lanes: 8,
            prefix_width: 32,
            sorter_width: 8,
            run_bits: 4,
            meta_width_ratio: 1.0,
            overlap_conversion: true,
            prefix_variant: PrefixVariant::default(),
            mint_variant: MintVariant::default(),
        }
    }
}

impl HardwareConfig {
    pub fn validate(&self) -> Result<()> {
        let complain = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.n_pe == 0
            || self.bus_elems_per_cycle == 0
            || self.pe_buffer_elems == 0
            || self.vector_lanes == 0
            || self.dram_bits_per_cycle == 0
            || self.div_mod_lanes == 0
            || self.prefix_width == 0
            || self.sorter_width == 0
        {
            return complain("all hardware counts must be >= 1");
        }
        if !matches!(self.dtype_bits, 8 | 16 | 32 | 64) {
            return complain("dtype_bits must be one of 8, 16, 32, 64");
        }
        if !(1..=32).contains(&self.run_bits) {
            return complain("run_bits must be in 1..=32");
        }
        if !(self.meta_width_ratio > 0.0) {
            return complain("meta_width_ratio must be positive");
        }
        for e in [
            self.e_dram_per_bit,
            self.e_mac,
            self.e_buf_access,
            self.e_stream_elem,
            self.e_conv_op,
        ] {
            if !(e >= 0.0) {
                return complain("energy constants must be non-negative");
            }
        }
        Ok(())
    }

    /// DRAM port width in data elements per cycle (at least one).
    pub fn mem_elems_per_cycle(&self) -> usize {
        (self.dram_bits_per_cycle / self.dtype_bits as usize).max(1)
    }
}

/// Bits of a stored operand split into payload values and format overhead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StorageBreakdown {
    pub data_bits: u64,
    pub metadata_bits: u64,
}

impl StorageBreakdown {
    pub fn total_bits(&self) -> u64 {
        self.data_bits + self.metadata_bits
    }

    pub fn metadata_fraction(&self) -> f64 {
        let total = self.total_bits();
        if total == 0 {
            0.0
        } else {
            self.metadata_bits as f64 / total as f64
        }
    }
}

/// Estimated run-length pair count for a uniform instance of the given
/// occupancy, matching the exact count whenever every gap fits in the run
/// fields. Each value pair's run field absorbs up to `2^r - 1` preceding
/// zeros; a dedicated escape pair absorbs `2^r`. Zeros beyond what the
/// value pairs can hold are charged to escape pairs. This is a capacity
/// estimate, not the expectation over random placements; exact per-instance
/// counts come from [`MatrixStats::from_matrix`].
pub fn estimated_rlc_pairs(nnz: usize, cells: usize, run_bits: u32) -> usize {
    debug_assert!(nnz <= cells);
    if nnz == 0 {
        return 0;
    }
    let q = 1usize << run_bits.min(usize::BITS - 1);
    let zeros = cells - nnz;
    let absorbed = nnz.saturating_mul(q - 1);
    nnz + zeros.saturating_sub(absorbed).div_ceil(q)
}

/// Expected number of occupied bins after dropping `n` items uniformly into
/// `bins` bins, rounded and clamped to the feasible range.
fn expected_occupied(bins: usize, n: usize) -> usize {
    if n == 0 || bins == 0 {
        return 0;
    }
    if n >= bins * 8 {
        return bins;
    }
    let b = bins as f64;
    let expect = b * (1.0 - (1.0 - 1.0 / b).powi(n as i32));
    (expect.round() as usize).clamp(1, n.min(bins))
}

/// Shape summary of a matrix operand: enough to evaluate every storage and
/// conversion formula without materializing the data. Exact when built from
/// an instance, estimated for hypothetical `(dims, nnz)` workloads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixStats {
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    /// Run-length pairs including escape fillers.
    pub rlc_pairs: usize,
    /// Occupied blocks under the block shape the stats were built with.
    pub bsr_blocks: usize,
}

impl MatrixStats {
    pub fn estimate(rows: usize, cols: usize, nnz: usize, params: &EncodeParams) -> MatrixStats {
        let cells = rows * cols;
        let (br, bc) = params.block;
        let grid = if br == 0 || bc == 0 {
            0
        } else {
            rows.div_ceil(br) * cols.div_ceil(bc)
        };
        MatrixStats {
            rows,
            cols,
            nnz,
            rlc_pairs: estimated_rlc_pairs(nnz, cells, params.run_bits),
            bsr_blocks: expected_occupied(grid, nnz),
        }
    }

    /// Exact statistics for a concrete operand, under `params` for the
    /// block shape and run width.
    pub fn from_matrix(x: &FormattedMatrix, params: &EncodeParams) -> MatrixStats {
        let (rows, cols) = (x.rows(), x.cols());
        let mut positions: Vec<usize> = match x {
            // Keep only value pairs; escape fillers are reconstructed below.
            FormattedMatrix::Rlc(r) => r
                .linear_positions()
                .into_iter()
                .zip(&r.pairs)
                .filter(|(_, (_, v))| *v != 0.0)
                .map(|(p, _)| p as usize)
                .collect(),
            FormattedMatrix::Dense(d) => d.nonzeros().map(|(i, j, _)| i * cols + j).collect(),
            FormattedMatrix::Coo(c) => c.entries().map(|(i, j, _)| i * cols + j).collect(),
            FormattedMatrix::Csr(c) => (0..c.rows)
                .flat_map(|i| c.row(i).0.iter().map(move |&j| i * cols + j))
                .collect(),
            FormattedMatrix::Csc(c) => (0..c.cols)
                .flat_map(|j| c.col(j).0.iter().map(move |&i| i * cols + j))
                .collect(),
            FormattedMatrix::Zvc(z) => z
                .mask
                .iter()
                .enumerate()
                .filter_map(|(p, &set)| set.then_some(p))
                .collect(),
            FormattedMatrix::Bsr(b) => {
                let mut out = Vec::with_capacity(b.nnz());
                for bi in 0..b.block_row_ptr.len() - 1 {
                    for t in b.block_row_ptr[bi]..b.block_row_ptr[bi + 1] {
                        let bj = b.block_col_ids[t];
                        for (cell, &v) in b.block(t).iter().enumerate() {
                            let (i, j) = (
                                bi * b.block_rows + cell / b.block_cols,
                                bj * b.block_cols + cell % b.block_cols,
                            );
                            if v != 0.0 && i < rows && j < cols {
                                out.push(i * cols + j);
                            }
                        }
                    }
                }
                out
            }
        };
        positions.sort_unstable();
        let run_bits = match x {
            FormattedMatrix::Rlc(r) => r.run_bits,
            _ => params.run_bits,
        };
        let (br, bc) = match x {
            FormattedMatrix::Bsr(b) => (b.block_rows, b.block_cols),
            _ => params.block,
        };
        let q = 1usize << run_bits.min(usize::BITS - 1);
        let mut pairs = 0usize;
        let mut prev: Option<usize> = None;
        let mut blocks = std::collections::HashSet::new();
        for &p in &positions {
            let gap = match prev {
                None => p,
                Some(q0) => p - q0 - 1,
            };
            pairs += 1 + gap / q;
            prev = Some(p);
            if br > 0 && bc > 0 && cols > 0 {
                blocks.insert((p / cols / br, p % cols / bc));
            }
        }
        MatrixStats {
            rows,
            cols,
            nnz: positions.len(),
            rlc_pairs: pairs,
            bsr_blocks: blocks.len(),
        }
    }

    pub fn cells(&self) -> usize {
        self.rows * self.cols
    }

    pub fn density(&self) -> f64 {
        if self.cells() == 0 {
            0.0
        } else {
            self.nnz as f64 / self.cells() as f64
        }
    }
}

/// Shape summary of a rank-3 tensor operand, mirroring [`MatrixStats`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TensorStats {
    pub dims: [usize; 3],
    pub nnz: usize,
    /// Node counts of the first two tree levels under the mode order the
    /// stats were built with (level three always has `nnz` nodes).
    pub csf_nodes: [usize; 2],
}

impl TensorStats {
    pub fn estimate(dims: [usize; 3], nnz: usize, params: &EncodeParams) -> TensorStats {
        let o = params.mode_order;
        let top = dims[o[0]];
        let mid = dims[o[0]].saturating_mul(dims[o[1]]);
        TensorStats {
            dims,
            nnz,
            csf_nodes: [expected_occupied(top, nnz), expected_occupied(mid, nnz)],
        }
    }

    pub fn from_tensor(x: &FormattedTensor3, params: &EncodeParams) -> TensorStats {
        if let FormattedTensor3::Csf(c) = x {
            return TensorStats {
                dims: c.dims,
                nnz: c.values.len(),
                csf_nodes: [c.idx0.len(), c.idx1.len()],
            };
        }
        let o = params.mode_order;
        let mut top = std::collections::HashSet::new();
        let mut mid = std::collections::HashSet::new();
        let mut nnz = 0usize;
        for ([i0, i1, i2], _) in crate::kernels::tensor_entries(x) {
            let key = [i0, i1, i2];
            top.insert(key[o[0]]);
            mid.insert((key[o[0]], key[o[1]]));
            nnz += 1;
        }
        TensorStats {
            dims: x.dims(),
            nnz,
            csf_nodes: [top.len(), mid.len()],
        }
    }

    pub fn cells(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }
}

/// Storage bits for a matrix format at the given shape statistics.
pub fn storage_bits(
    format: FormatId,
    stats: &MatrixStats,
    hw: &HardwareConfig,
    params: &EncodeParams,
) -> StorageBreakdown {
    let b = hw.dtype_bits as u64;
    let (m, k, nnz) = (stats.rows as u64, stats.cols as u64, stats.nnz as u64);
    let iw_m = index_bits(stats.rows) as u64;
    let iw_k = index_bits(stats.cols) as u64;
    let pw = pointer_bits(stats.nnz) as u64;
    match format {
        FormatId::Dense => StorageBreakdown {
            data_bits: m * k * b,
            metadata_bits: 0,
        },
        FormatId::Coo => StorageBreakdown {
            data_bits: nnz * b,
            metadata_bits: nnz * (iw_m + iw_k),
        },
        FormatId::Csr => StorageBreakdown {
            data_bits: nnz * b,
            metadata_bits: nnz * iw_k + (m + 1) * pw,
        },
        FormatId::Csc => StorageBreakdown {
            data_bits: nnz * b,
            metadata_bits: nnz * iw_m + (k + 1) * pw,
        },
        FormatId::Zvc => StorageBreakdown {
            data_bits: nnz * b,
            metadata_bits: m * k,
        },
        FormatId::Rlc => {
            let p = stats.rlc_pairs as u64;
            StorageBreakdown {
                data_bits: p * b,
                metadata_bits: p * hw.run_bits as u64,
            }
        }
        FormatId::Bsr => {
            let (br, bc) = params.block;
            let nblk = stats.bsr_blocks as u64;
            let grid_rows = stats.rows.div_ceil(br.max(1)) as u64;
            let block_cols_width = index_bits(stats.cols.div_ceil(bc.max(1))) as u64;
            StorageBreakdown {
                data_bits: nblk * (br * bc) as u64 * b,
                metadata_bits: nblk * block_cols_width
                    + (grid_rows + 1) * ceil_log2(stats.bsr_blocks + 2) as u64,
            }
        }
        FormatId::Csf => StorageBreakdown::default(),
    }
}

/// Storage bits for a rank-3 tensor format at the given shape statistics.
pub fn storage_bits_tensor(
    format: FormatId,
    stats: &TensorStats,
    hw: &HardwareConfig,
    params: &EncodeParams,
) -> StorageBreakdown {
    let b = hw.dtype_bits as u64;
    let nnz = stats.nnz as u64;
    let cells = stats.cells() as u64;
    let iw: Vec<u64> = stats.dims.iter().map(|&d| index_bits(d) as u64).collect();
    match format {
        FormatId::Dense => StorageBreakdown {
            data_bits: cells * b,
            metadata_bits: 0,
        },
        FormatId::Coo => StorageBreakdown {
            data_bits: nnz * b,
            metadata_bits: nnz * (iw[0] + iw[1] + iw[2]),
        },
        FormatId::Zvc => StorageBreakdown {
            data_bits: nnz * b,
            metadata_bits: cells,
        },
        FormatId::Csf => {
            let o = params.mode_order;
            let [n0, n1] = stats.csf_nodes;
            let idx = n0 as u64 * index_bits(stats.dims[o[0]]) as u64
                + n1 as u64 * index_bits(stats.dims[o[1]]) as u64
                + nnz * index_bits(stats.dims[o[2]]) as u64;
            let ptr = (n0 as u64 + 1) * ceil_log2(n1 + 2) as u64
                + (n1 as u64 + 1) * ceil_log2(stats.nnz + 2) as u64;
            StorageBreakdown {
                data_bits: nnz * b,
                metadata_bits: idx + ptr,
            }
        }
        _ => StorageBreakdown::default(),
    }
}

/// Exact storage breakdown of a concrete matrix, using the instance's own
/// run width and block shape where it has them.
pub fn storage_breakdown(x: &FormattedMatrix, hw: &HardwareConfig) -> StorageBreakdown {
    let mut params = EncodeParams {
        run_bits: hw.run_bits,
        ..EncodeParams::default()
    };
    let mut hw = hw.clone();
    if let FormattedMatrix::Rlc(r) = x {
        params.run_bits = r.run_bits;
        hw.run_bits = r.run_bits;
    }
    if let FormattedMatrix::Bsr(b) = x {
        params.block = (b.block_rows, b.block_cols);
    }
    let stats = MatrixStats::from_matrix(x, &params);
    storage_bits(x.format(), &stats, &hw, &params)
}

/// Exact storage breakdown of a concrete rank-3 tensor.
pub fn storage_breakdown_tensor(x: &FormattedTensor3, hw: &HardwareConfig) -> StorageBreakdown {
    let params = match x {
        FormattedTensor3::Csf(c) => EncodeParams {
            mode_order: c.mode_order,
            ..EncodeParams::default()
        },
        _ => EncodeParams::default(),
    };
    let stats = TensorStats::from_tensor(x, &params);
    storage_bits_tensor(x.format(), &stats, hw, &params)
}

/// Energy and cycle cost of moving `bits` through the DRAM interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DramCost {
    pub energy: f64,
    pub cycles: u64,
}

pub fn dram_cost(bits: u64, hw: &HardwareConfig) -> DramCost {
    DramCost {
        energy: bits as f64 * hw.e_dram_per_bit,
        cycles: bits.div_ceil(hw.dram_bits_per_cycle as u64),
    }
}

/// Deterministic tie order used whenever storage totals are equal: denser
/// layouts before pointer-heavy ones.
pub fn compactness_tie_order(f: FormatId) -> usize {
    match f {
        FormatId::Dense => 0,
        FormatId::Zvc => 1,
        FormatId::Rlc => 2,
        FormatId::Csr => 3,
        FormatId::Csc => 4,
        FormatId::Coo => 5,
        FormatId::Bsr => 6,
        FormatId::Csf => 7,
    }
}

/// Matrix formats considered when ranking storage compactness.
pub const MCF_CANDIDATES: [FormatId; 6] = [
    FormatId::Dense,
    FormatId::Zvc,
    FormatId::Rlc,
    FormatId::Csr,
    FormatId::Csc,
    FormatId::Coo,
];

/// Rank the candidate matrix formats by total storage bits, ascending, for
/// a hypothetical uniform instance of the given shape. Ties break by
/// [`compactness_tie_order`].
pub fn rank_mcf(
    rows: usize,
    cols: usize,
    nnz: usize,
    hw: &HardwareConfig,
) -> Vec<(FormatId, StorageBreakdown)> {
    let params = EncodeParams {
        run_bits: hw.run_bits,
        ..EncodeParams::default()
    };
    let stats = MatrixStats::estimate(rows, cols, nnz, &params);
    let mut out: Vec<(FormatId, StorageBreakdown)> = MCF_CANDIDATES
        .iter()
        .map(|&f| (f, storage_bits(f, &stats, hw, &params)))
        .collect();
    out.sort_by_key(|(f, s)| (s.total_bits(), compactness_tie_order(*f)));
    out
}
