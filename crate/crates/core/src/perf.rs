//! Weight-stationary accelerator performance model.
//!
//! The stationary operand is partitioned by column across PEs and held in
//! their buffers; the streamed operand is broadcast over a shared bus packed
//! with as many elements per cycle as fit alongside their metadata. Compute
//! overlaps streaming, so cycle counts are bus-bound: total cycles are the
//! stationary load plus the stream repeated for every column tile, and the
//! stream itself repeats once per buffer tile of the contraction dimension.
//! Result write-back runs on a dedicated port and is reported separately.

use crate::cost::HardwareConfig;
use crate::error::{Error, Result};
use crate::formats::{FormatId, FormattedMatrix, FormattedTensor3};

/// How one compute format travels on the bus: metadata shared by a whole
/// group (sent once per group) and metadata repeated with every element.
/// Group boundaries end a bus cycle early, so groups never share a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamDescriptor {
    pub acf: FormatId,
    /// Metadata elements sent once per group (e.g. the row id).
    pub shared_meta: usize,
    /// Metadata elements accompanying every data element.
    pub per_elem_meta: usize,
}

/// Bus behavior of a matrix compute format. Dense streams whole rows, zeros
/// included, with just the row id; CSR keeps rows but adds a column id per
/// element; CSC mirrors that column-major; COO groups are single elements
/// carrying both coordinates.
pub fn matrix_stream_descriptor(acf: FormatId) -> Result<StreamDescriptor> {
    let (shared_meta, per_elem_meta) = match acf {
        FormatId::Dense => (1, 0),
        FormatId::Csr => (1, 1),
        FormatId::Csc => (1, 1),
        FormatId::Coo => (0, 2),
        other => return Err(Error::UnsupportedStreamFormat { format: other }),
    };
    Ok(StreamDescriptor {
        acf,
        shared_meta,
        per_elem_meta,
    })
}

/// Bus behavior of a rank-3 compute format: fibers play the role of rows,
/// so the shared metadata is the two leading coordinates.
pub fn tensor_stream_descriptor(acf: FormatId) -> Result<StreamDescriptor> {
    let (shared_meta, per_elem_meta) = match acf {
        FormatId::Dense => (2, 0),
        FormatId::Csf => (2, 1),
        FormatId::Coo => (0, 3),
        other => return Err(Error::UnsupportedStreamFormat { format: other }),
    };
    Ok(StreamDescriptor {
        acf,
        shared_meta,
        per_elem_meta,
    })
}

/// Largest element count `n` such that `n` data elements, their per-element
/// metadata, and the group's shared metadata fit in one bus cycle.
pub fn max_elems_per_cycle(desc: &StreamDescriptor, hw: &HardwareConfig) -> Result<usize> {
    let ratio = hw.meta_width_ratio;
    let shared = desc.shared_meta as f64 * ratio;
    let per = 1.0 + desc.per_elem_meta as f64 * ratio;
    let n = ((hw.bus_elems_per_cycle as f64 - shared) / per + 1e-9).floor();
    if n < 1.0 {
        return Err(Error::BusTooNarrow {
            format: desc.acf,
            bus: hw.bus_elems_per_cycle as u64,
        });
    }
    Ok(n as usize)
}

/// Nonzero structure of a matrix operand, kept sparsely so the model scales
/// with the nonzero count, not the cell count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityProfile {
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    /// Nonzeros per column.
    pub col_nnz: Vec<usize>,
    /// Sorted column ids of each row's nonzeros.
    pub row_cols: Vec<Vec<usize>>,
}

impl SparsityProfile {
    pub fn from_matrix(x: &FormattedMatrix) -> SparsityProfile {
        let coo = crate::mint::to_coo(x);
        let (rows, cols) = (x.rows(), x.cols());
        let mut col_nnz = vec![0usize; cols];
        let mut row_cols = vec![Vec::new(); rows];
        for (i, j, _) in coo.entries() {
            col_nnz[j] += 1;
            row_cols[i].push(j);
        }
        SparsityProfile {
            rows,
            cols,
            nnz: coo.nnz(),
            col_nnz,
            row_cols,
        }
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_cols[i].len()
    }

    /// Nonzeros of row `i` whose column lies in `k0..k1`.
    fn row_nnz_in(&self, i: usize, k0: usize, k1: usize) -> usize {
        let cols = &self.row_cols[i];
        cols.partition_point(|&j| j < k1) - cols.partition_point(|&j| j < k0)
    }
}

/// Stream accounting for one contraction-range slice.
struct SlicePack {
    cycles: u64,
    /// Bus element-transfers, metadata at its configured relative width.
    elems: f64,
    /// Groups actually streamed; the output register flushes at each
    /// group boundary.
    groups: u64,
}

fn pack_slice(
    p: &SparsityProfile,
    desc: &StreamDescriptor,
    n: usize,
    k0: usize,
    k1: usize,
    hw: &HardwareConfig,
) -> SlicePack {
    let ratio = hw.meta_width_ratio;
    let shared = desc.shared_meta as f64 * ratio;
    let per = 1.0 + desc.per_elem_meta as f64 * ratio;
    let mut out = SlicePack {
        cycles: 0,
        elems: 0.0,
        groups: 0,
    };
    match desc.acf {
        FormatId::Dense => {
            // every row streams in full, zeros included
            let width = k1 - k0;
            if width > 0 {
                out.cycles = p.rows as u64 * width.div_ceil(n) as u64;
                out.elems = p.rows as f64 * (shared + width as f64 * per);
                out.groups = p.rows as u64;
            }
        }
        FormatId::Csr => {
            for i in 0..p.rows {
                let len = p.row_nnz_in(i, k0, k1);
                if len > 0 {
                    out.cycles += len.div_ceil(n) as u64;
                    out.elems += shared + len as f64 * per;
                    out.groups += 1;
                }
            }
        }
        FormatId::Coo => {
            // single-element groups: one bus cycle each, no batching
            for i in 0..p.rows {
                let len = p.row_nnz_in(i, k0, k1);
                if len > 0 {
                    out.cycles += len as u64;
                    out.elems += len as f64 * per;
                    out.groups += 1;
                }
            }
        }
        FormatId::Csc => {
            // column-major traversal: the row register changes almost every
            // element, so each element is its own flush
            for k in k0..k1 {
                let len = p.col_nnz[k];
                if len > 0 {
                    out.cycles += len.div_ceil(n) as u64;
                    out.elems += shared + len as f64 * per;
                    out.groups += len as u64;
                }
            }
        }
        _ => unreachable!("descriptor construction rejects other formats"),
    }
    out
}

/// Bus cycles to stream the whole operand once in the given compute format.
pub fn pack_stream(p: &SparsityProfile, acf: FormatId, hw: &HardwareConfig) -> Result<u64> {
    let desc = matrix_stream_descriptor(acf)?;
    let n = max_elems_per_cycle(&desc, hw)?;
    Ok(pack_slice(p, &desc, n, 0, p.cols, hw).cycles)
}

/// Buffer and bus footprint of the stationary operand, column-partitioned
/// across PEs.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryFootprint {
    /// Element slots each column occupies in its PE's buffer.
    pub occupancy: Vec<u64>,
    /// Bus element-transfers to deliver each column.
    pub delivery: Vec<u64>,
    /// Buffer tiles of the contraction dimension.
    pub k_tiles: usize,
    /// Column tiles over the PE array.
    pub col_tiles: usize,
    /// Data / metadata split of the fullest column's per-tile occupancy.
    pub buffer_data_elems: usize,
    pub buffer_meta_elems: usize,
}

/// Stationary footprint per compute format. Dense holds whole columns,
/// zeros included; CSC holds value + row-id pairs; COO additionally streams
/// its column id with every entry, though in the buffer that id is shared.
/// CSR cannot be column-partitioned without a transposition first.
pub fn stationary_footprint(
    b: &SparsityProfile,
    acf: FormatId,
    hw: &HardwareConfig,
) -> Result<StationaryFootprint> {
    let ratio = hw.meta_width_ratio;
    let meta_elems = |count: usize| (count as f64 * ratio).ceil() as u64;
    let mut occupancy = Vec::with_capacity(b.cols);
    let mut delivery = Vec::with_capacity(b.cols);
    for j in 0..b.cols {
        let nnz = b.col_nnz[j] as u64;
        let (occ, del) = match acf {
            FormatId::Dense => (b.rows as u64, b.rows as u64),
            FormatId::Csc => (nnz + meta_elems(nnz as usize), nnz + meta_elems(nnz as usize)),
            FormatId::Coo => (
                nnz + meta_elems(nnz as usize),
                nnz + meta_elems(2 * nnz as usize),
            ),
            other => return Err(Error::UnsupportedStationaryFormat { format: other }),
        };
        occupancy.push(occ);
        delivery.push(del);
    }
    let buffer = hw.pe_buffer_elems as u64;
    let occ_max = occupancy.iter().copied().max().unwrap_or(0);
    let k_tiles = (occ_max.div_ceil(buffer) as usize).max(1);
    let col_tiles = b.cols.div_ceil(hw.n_pe).max(1);
    let occ_tile = occ_max.div_ceil(k_tiles as u64) as usize;
    let (data, meta) = match acf {
        FormatId::Dense => (occ_tile, 0),
        _ => {
            let meta = (occ_tile as f64 * ratio / (1.0 + ratio)).floor() as usize;
            (occ_tile - meta, meta)
        }
    };
    Ok(StationaryFootprint {
        occupancy,
        delivery,
        k_tiles,
        col_tiles,
        buffer_data_elems: data,
        buffer_meta_elems: meta,
    })
}

/// One weight-stationary run's cycle, energy, and utilization estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct PerfReport {
    /// Cycles delivering the stationary operand into PE buffers.
    pub load_cycles: u64,
    /// Bus cycles streaming the moving operand, all tiles included.
    pub stream_cycles: u64,
    /// load + stream; compute overlaps streaming and write-back has its
    /// own port, so neither adds cycles.
    pub total_cycles: u64,
    /// Result write-back on the dedicated output port, one element/cycle.
    pub output_cycles: u64,
    /// Nonzero-times-nonzero multiply-accumulates; a property of the
    /// operands, identical under every compute format.
    pub useful_macs: u64,
    /// useful_macs / (n_pe * vector_lanes * total_cycles), clamped to [0,1].
    pub pe_utilization: f64,
    pub buffer_data_elems: usize,
    pub buffer_metadata_elems: usize,
    pub k_tiles: usize,
    pub col_tiles: usize,
    pub energy: f64,
}

fn finish_report(
    load_cycles: u64,
    stream_cycles: u64,
    output_cycles: u64,
    useful_macs: u64,
    stream_elems: f64,
    delivery_total: u64,
    flushes: u64,
    fp_data: usize,
    fp_meta: usize,
    k_tiles: usize,
    col_tiles: usize,
    hw: &HardwareConfig,
) -> PerfReport {
    let total_cycles = load_cycles + stream_cycles;
    let energy = useful_macs as f64 * hw.e_mac
        + (stream_elems + delivery_total as f64) * hw.e_stream_elem
        + (useful_macs + delivery_total + flushes) as f64 * hw.e_buf_access;
    let capacity = (hw.n_pe * hw.vector_lanes) as f64 * total_cycles as f64;
    let pe_utilization = if capacity > 0.0 {
        (useful_macs as f64 / capacity).clamp(0.0, 1.0)
    } else {
        0.0
    };
    PerfReport {
        load_cycles,
        stream_cycles,
        total_cycles,
        output_cycles,
        useful_macs,
        pe_utilization,
        buffer_data_elems: fp_data,
        buffer_metadata_elems: fp_meta,
        k_tiles,
        col_tiles,
        energy,
    }
}

/// Simulate `A x B` with `A` streamed in `acf_a` and `B` stationary in
/// `acf_b`. The contraction dimension is split into `k_tiles` equal ranges
/// refilling the PE buffers, and the stream repeats for every column tile.
pub fn simulate_ws(
    a: &SparsityProfile,
    b: &SparsityProfile,
    acf_a: FormatId,
    acf_b: FormatId,
    hw: &HardwareConfig,
) -> Result<PerfReport> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "streamed operand is {}x{} but stationary operand is {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let desc = matrix_stream_descriptor(acf_a)?;
    let n = max_elems_per_cycle(&desc, hw)?;
    let fp = stationary_footprint(b, acf_b, hw)?;
    let k = a.cols;
    let mut stream_once = 0u64;
    let mut stream_elems_once = 0.0f64;
    let mut groups = 0u64;
    for t in 0..fp.k_tiles {
        let k0 = t * k / fp.k_tiles;
        let k1 = (t + 1) * k / fp.k_tiles;
        let sp = pack_slice(a, &desc, n, k0, k1, hw);
        stream_once += sp.cycles;
        stream_elems_once += sp.elems;
        groups += sp.groups;
    }
    let stream_cycles = stream_once * fp.col_tiles as u64;
    let stream_elems = stream_elems_once * fp.col_tiles as f64;
    let mut load_cycles = 0u64;
    let mut delivery_total = 0u64;
    for tile in 0..fp.col_tiles {
        let j0 = tile * hw.n_pe;
        let j1 = ((tile + 1) * hw.n_pe).min(b.cols);
        let d: u64 = fp.delivery[j0..j1.max(j0)].iter().sum();
        delivery_total += d;
        load_cycles += d.div_ceil(hw.bus_elems_per_cycle as u64);
    }
    let useful_macs: u64 = (0..k)
        .map(|kk| a.col_nnz[kk] as u64 * b.row_nnz(kk) as u64)
        .sum();
    let flushes = groups * b.cols as u64;
    Ok(finish_report(
        load_cycles,
        stream_cycles,
        (a.rows * b.cols) as u64,
        useful_macs,
        stream_elems,
        delivery_total,
        flushes,
        fp.buffer_data_elems,
        fp.buffer_meta_elems,
        fp.k_tiles,
        fp.col_tiles,
        hw,
    ))
}

/// Nonzero structure of a rank-3 operand: the sorted mode-2 coordinates of
/// every nonempty (mode-0, mode-1) fiber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorProfile {
    pub dims: [usize; 3],
    pub nnz: usize,
    pub fibers: Vec<Vec<usize>>,
}

impl TensorProfile {
    pub fn from_tensor(x: &FormattedTensor3) -> TensorProfile {
        let mut entries = crate::kernels::tensor_entries(x);
        entries.sort_unstable_by_key(|&(idx, _)| idx);
        let nnz = entries.len();
        let mut fibers: Vec<Vec<usize>> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for ([i, j, k], _) in entries {
            if last != Some((i, j)) {
                fibers.push(Vec::new());
                last = Some((i, j));
            }
            fibers.last_mut().expect("pushed above").push(k);
        }
        TensorProfile {
            dims: x.dims(),
            nnz,
            fibers,
        }
    }
}

fn pack_tensor_slice(
    p: &TensorProfile,
    desc: &StreamDescriptor,
    n: usize,
    k0: usize,
    k1: usize,
    hw: &HardwareConfig,
) -> SlicePack {
    let ratio = hw.meta_width_ratio;
    let shared = desc.shared_meta as f64 * ratio;
    let per = 1.0 + desc.per_elem_meta as f64 * ratio;
    let mut out = SlicePack {
        cycles: 0,
        elems: 0.0,
        groups: 0,
    };
    match desc.acf {
        FormatId::Dense => {
            let width = k1 - k0;
            if width > 0 {
                let n_fibers = (p.dims[0] * p.dims[1]) as u64;
                out.cycles = n_fibers * width.div_ceil(n) as u64;
                out.elems = n_fibers as f64 * (shared + width as f64 * per);
                out.groups = n_fibers;
            }
        }
        FormatId::Csf | FormatId::Coo => {
            for fiber in &p.fibers {
                let len =
                    fiber.partition_point(|&k| k < k1) - fiber.partition_point(|&k| k < k0);
                if len > 0 {
                    out.cycles += if desc.acf == FormatId::Coo {
                        len as u64
                    } else {
                        len.div_ceil(n) as u64
                    };
                    out.elems += shared + len as f64 * per;
                    out.groups += 1;
                }
            }
        }
        _ => unreachable!("descriptor construction rejects other formats"),
    }
    out
}

/// Bus cycles to stream the whole rank-3 operand once.
pub fn pack_stream_tensor(p: &TensorProfile, acf: FormatId, hw: &HardwareConfig) -> Result<u64> {
    let desc = tensor_stream_descriptor(acf)?;
    let n = max_elems_per_cycle(&desc, hw)?;
    Ok(pack_tensor_slice(p, &desc, n, 0, p.dims[2], hw).cycles)
}

fn simulate_tensor_common(
    p: &TensorProfile,
    f_cols: usize,
    acf: FormatId,
    stationary_rows: usize,
    slice_stream: bool,
    useful_macs: u64,
    output_cycles: u64,
    hw: &HardwareConfig,
) -> Result<PerfReport> {
    let desc = tensor_stream_descriptor(acf)?;
    let n = max_elems_per_cycle(&desc, hw)?;
    let k_tiles = (stationary_rows.div_ceil(hw.pe_buffer_elems)).max(1);
    let col_tiles = f_cols.div_ceil(hw.n_pe).max(1);
    let mut stream_once = 0u64;
    let mut elems_once = 0.0f64;
    let mut groups = 0u64;
    if slice_stream {
        let k = p.dims[2];
        for t in 0..k_tiles {
            let k0 = t * k / k_tiles;
            let k1 = (t + 1) * k / k_tiles;
            let sp = pack_tensor_slice(p, &desc, n, k0, k1, hw);
            stream_once += sp.cycles;
            elems_once += sp.elems;
            groups += sp.groups;
        }
    } else {
        // two stationary factors cannot be sliced independently, so the
        // whole stream repeats per buffer tile
        let sp = pack_tensor_slice(p, &desc, n, 0, p.dims[2], hw);
        stream_once = sp.cycles * k_tiles as u64;
        elems_once = sp.elems * k_tiles as f64;
        groups = sp.groups * k_tiles as u64;
    }
    let stream_cycles = stream_once * col_tiles as u64;
    let stream_elems = elems_once * col_tiles as f64;
    let mut load_cycles = 0u64;
    let mut delivery_total = 0u64;
    for tile in 0..col_tiles {
        let j0 = tile * hw.n_pe;
        let j1 = ((tile + 1) * hw.n_pe).min(f_cols);
        let d = (j1.saturating_sub(j0) * stationary_rows) as u64;
        delivery_total += d;
        load_cycles += d.div_ceil(hw.bus_elems_per_cycle as u64);
    }
    let flushes = groups * f_cols as u64;
    let occ_tile = stationary_rows.div_ceil(k_tiles);
    Ok(finish_report(
        load_cycles,
        stream_cycles,
        output_cycles,
        useful_macs,
        stream_elems,
        delivery_total,
        flushes,
        occ_tile,
        0,
        k_tiles,
        col_tiles,
        hw,
    ))
}

/// Simulate a tensor-times-matrix contraction over mode 2: the rank-3
/// operand streams against a stationary dense `dims[2] x f_cols` factor.
pub fn simulate_spttm_ws(
    p: &TensorProfile,
    f_cols: usize,
    acf: FormatId,
    hw: &HardwareConfig,
) -> Result<PerfReport> {
    let macs = (p.nnz * f_cols) as u64;
    let output = (p.dims[0] * p.dims[1] * f_cols) as u64;
    simulate_tensor_common(p, f_cols, acf, p.dims[2], true, macs, output, hw)
}

/// Simulate the matricized tensor-times-Khatri-Rao product: both dense
/// factors (`dims[1] x f` and `dims[2] x f`) sit stationary, and each
/// nonzero contributes two multiplies per output column.
pub fn simulate_mttkrp_ws(
    p: &TensorProfile,
    f_cols: usize,
    acf: FormatId,
    hw: &HardwareConfig,
) -> Result<PerfReport> {
    let macs = (2 * p.nnz * f_cols) as u64;
    let output = (p.dims[0] * f_cols) as u64;
    let stationary_rows = p.dims[1] + p.dims[2];
    simulate_tensor_common(p, f_cols, acf, stationary_rows, false, macs, output, hw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::testing::example_tensor;
    use crate::formats::{
        from_dense_tensor3, CooMatrix, DenseMatrix, EncodeParams, FormattedMatrix,
    };

    /// The published streaming walk-through: 4 PEs, a 5-element bus, and
    /// 8-element PE buffers.
    fn small_hw() -> HardwareConfig {
        HardwareConfig {
            n_pe: 4,
            bus_elems_per_cycle: 5,
            pe_buffer_elems: 8,
            ..HardwareConfig::default()
        }
    }

    /// 4x8 stream operand with 2, 1, 1, 0 nonzeros per row.
    fn walkthrough_a() -> SparsityProfile {
        let coo = CooMatrix::from_sorted_entries(
            4,
            8,
            vec![(0, 1, 1.0), (0, 5, 2.0), (1, 2, 3.0), (2, 6, 4.0)],
        );
        SparsityProfile::from_matrix(&FormattedMatrix::Coo(coo))
    }

    fn dense_profile(d: &DenseMatrix) -> SparsityProfile {
        SparsityProfile::from_matrix(&FormattedMatrix::Dense(d.clone()))
    }

    #[test]
    fn walkthrough_stream_cycles_are_8_3_4() {
        let hw = small_hw();
        let a = walkthrough_a();
        assert_eq!(pack_stream(&a, FormatId::Dense, &hw).unwrap(), 8);
        assert_eq!(pack_stream(&a, FormatId::Csr, &hw).unwrap(), 3);
        assert_eq!(pack_stream(&a, FormatId::Coo, &hw).unwrap(), 4);
    }

    #[test]
    fn coordinate_entries_never_share_a_cycle_on_a_narrow_bus() {
        let hw = small_hw();
        let desc = tensor_stream_descriptor(FormatId::Coo).unwrap();
        // 2 entries x (1 data + 3 coords) = 8 > 5, and even on the default
        // 16-wide bus the single-element groups stream one per cycle
        assert_eq!(max_elems_per_cycle(&desc, &hw).unwrap(), 1);
        let desc = matrix_stream_descriptor(FormatId::Coo).unwrap();
        assert_eq!(max_elems_per_cycle(&desc, &hw).unwrap(), 1);
    }

    #[test]
    fn too_narrow_bus_is_an_error() {
        let hw = HardwareConfig {
            bus_elems_per_cycle: 2,
            ..small_hw()
        };
        let desc = matrix_stream_descriptor(FormatId::Coo).unwrap();
        assert!(matches!(
            max_elems_per_cycle(&desc, &hw),
            Err(Error::BusTooNarrow { .. })
        ));
    }

    #[test]
    fn compressed_formats_are_rejected_for_streaming_and_stationary_roles() {
        let hw = small_hw();
        let a = walkthrough_a();
        assert!(matches!(
            pack_stream(&a, FormatId::Zvc, &hw),
            Err(Error::UnsupportedStreamFormat { .. })
        ));
        assert!(matches!(
            stationary_footprint(&a, FormatId::Csr, &hw),
            Err(Error::UnsupportedStationaryFormat { .. })
        ));
    }

    #[test]
    fn stationary_footprint_examples() {
        let hw = small_hw();
        // dense 8x4 exactly fills the 8-element buffers
        let b = dense_profile(&DenseMatrix::from_rows(&[&[1.0; 4][..]; 8]));
        let fp = stationary_footprint(&b, FormatId::Dense, &hw).unwrap();
        assert_eq!(fp.occupancy, vec![8; 4]);
        assert_eq!(fp.k_tiles, 1);
        assert_eq!(fp.col_tiles, 1);
        assert_eq!(fp.buffer_data_elems, 8);
        assert_eq!(fp.buffer_meta_elems, 0);

        // compressed columns with 4 nonzeros each occupy 8 slots: half
        // values, half row ids
        let mut sparse = DenseMatrix::zeros(16, 4);
        for j in 0..4 {
            for i in 0..4 {
                sparse.set(2 * i + j % 2, j, 1.0);
            }
        }
        let fp =
            stationary_footprint(&dense_profile(&sparse), FormatId::Csc, &hw).unwrap();
        assert_eq!(fp.occupancy, vec![8; 4]);
        assert_eq!(fp.k_tiles, 1);
        assert_eq!(fp.buffer_data_elems, 4);
        assert_eq!(fp.buffer_meta_elems, 4);

        // a 16-deep dense column needs two buffer tiles
        let tall = dense_profile(&DenseMatrix::from_rows(&[&[1.0; 4][..]; 16]));
        let fp = stationary_footprint(&tall, FormatId::Dense, &hw).unwrap();
        assert_eq!(fp.k_tiles, 2);
    }

    #[test]
    fn coordinate_stationary_delivery_carries_the_extra_coordinate() {
        let hw = small_hw();
        let mut b = DenseMatrix::zeros(8, 2);
        b.set(0, 0, 1.0);
        b.set(3, 0, 2.0);
        b.set(5, 1, 3.0);
        let p = dense_profile(&b);
        let csc = stationary_footprint(&p, FormatId::Csc, &hw).unwrap();
        let coo = stationary_footprint(&p, FormatId::Coo, &hw).unwrap();
        assert_eq!(csc.occupancy, coo.occupancy);
        assert_eq!(csc.delivery, vec![4, 2]);
        assert_eq!(coo.delivery, vec![6, 3]);
    }

    #[test]
    fn walkthrough_simulation_separates_load_and_stream() {
        let hw = small_hw();
        let a = walkthrough_a();
        let b = dense_profile(&DenseMatrix::from_rows(&[&[1.0; 4][..]; 8]));
        let r = simulate_ws(&a, &b, FormatId::Dense, FormatId::Dense, &hw).unwrap();
        assert_eq!(r.stream_cycles, 8);
        // 32 stationary elements over a 5-wide bus
        assert_eq!(r.load_cycles, 7);
        assert_eq!(r.total_cycles, 15);
        assert_eq!(r.output_cycles, 16);
        let r = simulate_ws(&a, &b, FormatId::Csr, FormatId::Dense, &hw).unwrap();
        assert_eq!(r.stream_cycles, 3);
        let r = simulate_ws(&a, &b, FormatId::Coo, FormatId::Dense, &hw).unwrap();
        assert_eq!(r.stream_cycles, 4);
    }

    #[test]
    fn identity_product_counts_diagonal_macs() {
        let hw = small_hw();
        let mut eye = DenseMatrix::zeros(4, 4);
        for i in 0..4 {
            eye.set(i, i, 1.0);
        }
        let p = dense_profile(&eye);
        let r = simulate_ws(&p, &p, FormatId::Dense, FormatId::Dense, &hw).unwrap();
        assert_eq!(r.useful_macs, 4);
        assert!(r.pe_utilization > 0.0 && r.pe_utilization <= 1.0);
    }

    #[test]
    fn useful_macs_do_not_depend_on_the_compute_format() {
        let hw = HardwareConfig::default();
        let mut a = DenseMatrix::zeros(8, 8);
        let mut b = DenseMatrix::zeros(8, 8);
        for i in 0..8 {
            a.set(i, (i * 3) % 8, 1.0);
            a.set(i, (i * 5 + 1) % 8, 2.0);
            b.set((i * 7) % 8, i, 3.0);
            b.set(i, (i + 2) % 8, 4.0);
        }
        let pa = dense_profile(&a);
        let pb = dense_profile(&b);
        let mut macs = Vec::new();
        for acf_a in [FormatId::Dense, FormatId::Csr, FormatId::Csc, FormatId::Coo] {
            for acf_b in [FormatId::Dense, FormatId::Csc, FormatId::Coo] {
                macs.push(
                    simulate_ws(&pa, &pb, acf_a, acf_b, &hw)
                        .unwrap()
                        .useful_macs,
                );
            }
        }
        assert!(macs.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn full_density_favors_dense_streaming() {
        let hw = HardwareConfig::default();
        let full = DenseMatrix::from_rows(
            &vec![&[1.0; 64][..]; 64],
        );
        let p = dense_profile(&full);
        let dense = simulate_ws(&p, &p, FormatId::Dense, FormatId::Dense, &hw).unwrap();
        let csr = simulate_ws(&p, &p, FormatId::Csr, FormatId::Csc, &hw).unwrap();
        assert!(dense.stream_cycles < csr.stream_cycles);
    }

    #[test]
    fn coordinate_streaming_never_beats_row_streaming_on_busy_rows() {
        let hw = small_hw();
        // every row has at least two nonzeros
        let mut d = DenseMatrix::zeros(16, 32);
        for i in 0..16 {
            d.set(i, (i * 7 + 3) % 32, 1.0);
            d.set(i, (i * 13 + 5) % 32, 2.0);
            d.set(i, (i * 11 + 1) % 32, 3.0);
        }
        let p = dense_profile(&d);
        let coo = pack_stream(&p, FormatId::Coo, &hw).unwrap();
        let csr = pack_stream(&p, FormatId::Csr, &hw).unwrap();
        assert!(coo >= csr, "coo {coo} vs csr {csr}");
    }

    #[test]
    fn row_compression_beats_dense_below_a_crossover_density() {
        let hw = HardwareConfig::default();
        let fill = |density: f64| -> SparsityProfile {
            let mut d = DenseMatrix::zeros(64, 64);
            let nnz = (density * 4096.0).round() as usize;
            for p in 0..nnz {
                // fixed low-discrepancy fill pattern
                let pos = (p * 2654435761usize) % 4096;
                d.values[pos] = 1.0 + p as f64;
            }
            dense_profile(&d)
        };
        let cmp = |density: f64| -> i64 {
            let p = fill(density);
            pack_stream(&p, FormatId::Csr, &hw).unwrap() as i64
                - pack_stream(&p, FormatId::Dense, &hw).unwrap() as i64
        };
        assert!(cmp(0.01) < 0, "sparse instances should pack tighter as rows");
        assert!(cmp(1.0) >= 0, "full instances should pack tighter dense");
        let (mut lo, mut hi) = (0.01, 1.0);
        for _ in 0..20 {
            let mid = 0.5 * (lo + hi);
            if cmp(mid) < 0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(lo > 0.01 && hi < 1.0, "crossover is interior: {lo}..{hi}");
        assert!(cmp(lo * 0.5) < 0, "below the crossover compression wins");
    }

    #[test]
    fn buffer_partition_fits_for_odd_tilings() {
        let hw = small_hw();
        let mut b = DenseMatrix::zeros(20, 4);
        for i in 0..9 {
            b.set(2 * i, 0, 1.0);
        }
        let fp = stationary_footprint(&dense_profile(&b), FormatId::Csc, &hw).unwrap();
        assert_eq!(fp.occupancy[0], 18);
        assert_eq!(fp.k_tiles, 3);
        assert!(fp.buffer_data_elems + fp.buffer_meta_elems <= hw.pe_buffer_elems);
        assert_eq!(fp.buffer_data_elems, 3);
        assert_eq!(fp.buffer_meta_elems, 3);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let hw = small_hw();
        let a = walkthrough_a();
        let b = dense_profile(&DenseMatrix::zeros(7, 4));
        assert!(matches!(
            simulate_ws(&a, &b, FormatId::Dense, FormatId::Dense, &hw),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn tensor_stream_cycles_follow_fiber_grouping() {
        let hw = small_hw();
        let t = from_dense_tensor3(&example_tensor(), FormatId::Dense, &EncodeParams::default())
            .unwrap();
        let p = TensorProfile::from_tensor(&t);
        assert_eq!(p.nnz, 3);
        assert_eq!(p.fibers, vec![vec![0], vec![1], vec![1]]);
        // dense: 4 fibers of width 2, 3 elements/cycle after 2 shared coords
        assert_eq!(pack_stream_tensor(&p, FormatId::Dense, &hw).unwrap(), 4);
        // coordinates: one nonzero per cycle
        assert_eq!(pack_stream_tensor(&p, FormatId::Coo, &hw).unwrap(), 3);
        // fiber tree: one cycle per nonempty fiber
        assert_eq!(pack_stream_tensor(&p, FormatId::Csf, &hw).unwrap(), 3);
    }

    #[test]
    fn tensor_contractions_report_consistent_shapes() {
        let hw = HardwareConfig::default();
        let t = from_dense_tensor3(&example_tensor(), FormatId::Csf, &EncodeParams::default())
            .unwrap();
        let p = TensorProfile::from_tensor(&t);
        let spttm = simulate_spttm_ws(&p, 6, FormatId::Csf, &hw).unwrap();
        assert_eq!(spttm.useful_macs, 3 * 6);
        assert_eq!(spttm.output_cycles, 2 * 2 * 6);
        assert_eq!(spttm.col_tiles, 1);
        let mttkrp = simulate_mttkrp_ws(&p, 6, FormatId::Csf, &hw).unwrap();
        assert_eq!(mttkrp.useful_macs, 2 * 3 * 6);
        assert_eq!(mttkrp.output_cycles, 2 * 6);
        assert!(mttkrp.total_cycles >= mttkrp.stream_cycles);
    }

    #[test]
    fn mttkrp_repeats_the_stream_per_buffer_tile() {
        let hw = HardwareConfig {
            pe_buffer_elems: 4,
            ..HardwareConfig::default()
        };
        // both factors stationary: 2 + 2 rows over 4-slot buffers = 1 tile,
        // then shrink the buffer to force 2 tiles and expect double cycles
        let t = from_dense_tensor3(&example_tensor(), FormatId::Coo, &EncodeParams::default())
            .unwrap();
        let p = TensorProfile::from_tensor(&t);
        let one = simulate_mttkrp_ws(&p, 2, FormatId::Coo, &hw).unwrap();
        let hw2 = HardwareConfig {
            pe_buffer_elems: 2,
            ..hw
        };
        let two = simulate_mttkrp_ws(&p, 2, FormatId::Coo, &hw2).unwrap();
        assert_eq!(one.k_tiles, 1);
        assert_eq!(two.k_tiles, 2);
        assert_eq!(two.stream_cycles, 2 * one.stream_cycles);
    }
}
