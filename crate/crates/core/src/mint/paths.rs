//! Conversion planning (which building blocks run, over how many elements)
//! and the functional converters that actually re-encode operands.
//!
//! Every non-identity plan starts with a memory-controller stage reading the
//! source encoding and ends with one writing the destination encoding, with
//! the compute blocks pipelined in between. Pairs without a handwritten
//! direct path are routed through COO and costed as a single pipeline.

use std::collections::BTreeMap;

use super::{conversion_cost, BlockKind, ConversionCost, ConversionPlan, PlanStage};
use crate::cost::{HardwareConfig, MatrixStats, TensorStats};
use crate::error::{Error, Result};
use crate::formats::{
    BsrMatrix, CooMatrix, CooTensor3, CscMatrix, CsfTensor3, CsrMatrix, DenseTensor3,
    EncodeParams, FormatId, FormattedMatrix, FormattedTensor3, RlcMatrix, ZvcMatrix, ZvcTensor3,
};

/// Stage list under construction; zero-element stages are dropped so plans
/// only mention work that actually happens.
struct Stages<'a> {
    hw: &'a HardwareConfig,
    list: Vec<PlanStage>,
}

impl<'a> Stages<'a> {
    fn new(hw: &'a HardwareConfig) -> Self {
        Stages {
            hw,
            list: Vec::new(),
        }
    }

    fn push(&mut self, block: BlockKind, elements: usize) {
        if elements > 0 {
            self.list.push(PlanStage { block, elements });
        }
    }

    fn mem(&mut self, words: usize) {
        self.push(BlockKind::MemController, words);
    }

    fn prefix(&mut self, n: usize) {
        self.push(
            BlockKind::PrefixSum {
                variant: self.hw.prefix_variant,
                width: self.hw.prefix_width,
            },
            n,
        );
    }

    fn div(&mut self, n: usize) {
        self.push(
            BlockKind::ParallelDiv {
                lanes: self.hw.div_mod_lanes,
            },
            n,
        );
    }

    fn modulo(&mut self, n: usize) {
        self.push(
            BlockKind::ParallelMod {
                lanes: self.hw.div_mod_lanes,
            },
            n,
        );
    }

    fn sorter(&mut self, n: usize) {
        self.push(
            BlockKind::Sorter {
                width: self.hw.sorter_width,
            },
            n,
        );
    }

    fn cluster(&mut self, n: usize) {
        self.push(BlockKind::ClusterCounter, n);
    }

    fn comp(&mut self, n: usize) {
        self.push(
            BlockKind::Comparators {
                width: self.hw.vector_lanes,
            },
            n,
        );
    }
}

/// Memory words occupied by a matrix encoding, counting every index,
/// pointer, or mask word alongside the values. Bitmask bits are packed
/// `dtype_bits` to a word.
pub fn matrix_words(
    format: FormatId,
    st: &MatrixStats,
    hw: &HardwareConfig,
    params: &EncodeParams,
) -> usize {
    let n = st.nnz;
    match format {
        FormatId::Dense => st.cells(),
        FormatId::Coo => 3 * n,
        FormatId::Csr => 2 * n + st.rows + 1,
        FormatId::Csc => 2 * n + st.cols + 1,
        FormatId::Rlc => 2 * st.rlc_pairs,
        FormatId::Zvc => n + st.cells().div_ceil(hw.dtype_bits as usize),
        FormatId::Bsr => {
            let (br, bc) = params.block;
            let grid_rows = if br == 0 { 0 } else { st.rows.div_ceil(br) };
            st.bsr_blocks * br * bc + st.bsr_blocks + grid_rows + 1
        }
        FormatId::Csf => 0,
    }
}

/// Memory words occupied by a rank-3 tensor encoding.
pub fn tensor_words(format: FormatId, st: &TensorStats, hw: &HardwareConfig) -> usize {
    let n = st.nnz;
    let [n0, n1] = st.csf_nodes;
    match format {
        FormatId::Dense => st.cells(),
        FormatId::Coo => 4 * n,
        FormatId::Zvc => n + st.cells().div_ceil(hw.dtype_bits as usize),
        FormatId::Csf => 2 * n + n0 + n1 + (n0 + 1) + (n1 + 1),
        _ => 0,
    }
}

/// Compute stages (no memory controllers) for the directly supported pairs;
/// `None` means the pair is reached through the COO hub.
fn direct_matrix_stages(
    src: FormatId,
    dst: FormatId,
    st: &MatrixStats,
    hw: &HardwareConfig,
    params: &EncodeParams,
) -> Option<Vec<PlanStage>> {
    use FormatId::*;
    let n = st.nnz;
    let cells = st.cells();
    let pairs = st.rlc_pairs;
    let nblk = st.bsr_blocks;
    let (br, bc) = params.block;
    let grid_rows = if br == 0 { 0 } else { st.rows.div_ceil(br) };
    let mut s = Stages::new(hw);
    match (src, dst) {
        // Dense scans: compare every cell, prefix over the presence flags to
        // place survivors, then derive whatever coordinates the target keeps.
        (Dense, Csr) => {
            s.comp(cells);
            s.prefix(cells);
            s.modulo(n);
            s.prefix(st.rows + 1);
        }
        (Dense, Csc) => {
            s.comp(cells);
            s.prefix(cells);
            s.modulo(n);
            s.prefix(st.cols + 1);
        }
        (Dense, Coo) => {
            s.comp(cells);
            s.prefix(cells);
            s.div(n);
            s.modulo(n);
        }
        (Dense, Zvc) => {
            s.comp(cells);
            s.prefix(cells);
        }
        (Dense, Rlc) => {
            s.comp(cells);
            s.cluster(cells);
        }
        (Dense, Bsr) => {
            s.comp(cells);
            s.prefix(grid_rows + 1);
        }
        // Decompression is pure data movement: the memory controller scatters
        // by the positions the encoding already carries. RLC first has to
        // turn its relative runs into absolute positions.
        (Rlc, Dense) => s.prefix(pairs),
        (_, Dense) => {}
        // Transposition re-sorts the coordinate pairs, re-counts the runs of
        // equal major coordinate, and rebuilds the pointer array.
        (Csr, Csc) => {
            s.sorter(n);
            s.cluster(n);
            s.prefix(st.cols + 1);
        }
        (Csc, Csr) => {
            s.sorter(n);
            s.cluster(n);
            s.prefix(st.rows + 1);
        }
        (Rlc, Coo) => {
            s.comp(pairs);
            s.prefix(pairs);
            s.div(n);
            s.modulo(n);
        }
        (Coo, Rlc) => {
            s.div(n);
            s.comp(n);
        }
        (Csr, Bsr) => {
            s.div(n);
            s.comp(n);
            s.cluster(nblk);
            s.prefix(grid_rows + 1);
        }
        (Coo, Csr) => {
            s.cluster(n);
            s.prefix(st.rows + 1);
        }
        (Csr, Coo) => s.comp(n),
        (Coo, Csc) => {
            s.sorter(n);
            s.cluster(n);
            s.prefix(st.cols + 1);
        }
        (Csc, Coo) => {
            s.comp(n);
            s.sorter(n);
        }
        (Zvc, Coo) => {
            s.prefix(cells);
            s.div(n);
            s.modulo(n);
        }
        (Coo, Zvc) => s.div(n),
        (Bsr, Coo) => {
            s.comp(nblk * br * bc);
            s.prefix(nblk * br * bc);
            s.div(n);
            s.modulo(n);
        }
        (Coo, Bsr) => {
            let head = direct_matrix_stages(Coo, Csr, st, hw, params)?;
            let tail = direct_matrix_stages(Csr, Bsr, st, hw, params)?;
            s.list = head;
            s.list.extend(tail);
        }
        _ => return None,
    }
    Some(s.list)
}

/// Plan the building-block pipeline converting `src` to `dst` for an operand
/// with the given shape statistics. The identity conversion is an empty
/// plan; everything else reads the source and writes the destination through
/// the memory controller around its compute stages.
pub fn plan_matrix_conversion(
    src: FormatId,
    dst: FormatId,
    st: &MatrixStats,
    hw: &HardwareConfig,
    params: &EncodeParams,
) -> Result<ConversionPlan> {
    for f in [src, dst] {
        if !f.is_matrix_format() {
            return Err(Error::NotAMatrixFormat(f));
        }
    }
    if src == dst {
        return Ok(ConversionPlan::identity(src));
    }
    let compute = match direct_matrix_stages(src, dst, st, hw, params) {
        Some(stages) => stages,
        None => {
            let mut head = direct_matrix_stages(src, FormatId::Coo, st, hw, params)
                .ok_or(Error::NoConversionPath { from: src, to: dst })?;
            let tail = direct_matrix_stages(FormatId::Coo, dst, st, hw, params)
                .ok_or(Error::NoConversionPath { from: src, to: dst })?;
            head.extend(tail);
            head
        }
    };
    let mut s = Stages::new(hw);
    s.mem(matrix_words(src, st, hw, params));
    s.list.extend(compute);
    s.mem(matrix_words(dst, st, hw, params));
    Ok(ConversionPlan {
        src,
        dst,
        stages: s.list,
    })
}

/// Compute stages for the directly supported rank-3 pairs. Coordinate work
/// runs over `2n` elements because two of the three coordinates must be
/// derived (the third falls out of the remainder chain).
fn direct_tensor_stages(
    src: FormatId,
    dst: FormatId,
    st: &TensorStats,
    hw: &HardwareConfig,
) -> Option<Vec<PlanStage>> {
    use FormatId::*;
    let n = st.nnz;
    let cells = st.cells();
    let [n0, n1] = st.csf_nodes;
    let mut s = Stages::new(hw);
    match (src, dst) {
        (Dense, Coo) => {
            s.comp(cells);
            s.prefix(cells);
            s.div(2 * n);
            s.modulo(2 * n);
        }
        (Dense, Zvc) => {
            s.comp(cells);
            s.prefix(cells);
        }
        (Dense, Csf) => {
            s.comp(cells);
            s.prefix(cells);
            s.div(2 * n);
            s.modulo(2 * n);
            s.comp(2 * n);
            s.prefix(n0 + n1 + 2);
        }
        (_, Dense) => {}
        (Coo, Csf) => {
            s.sorter(n);
            s.comp(2 * n);
            s.prefix(n0 + n1 + 2);
        }
        (Csf, Coo) => s.comp(2 * n),
        (Zvc, Coo) => {
            s.prefix(cells);
            s.div(2 * n);
            s.modulo(2 * n);
        }
        (Coo, Zvc) => s.div(n),
        _ => return None,
    }
    Some(s.list)
}

/// Rank-3 counterpart of [`plan_matrix_conversion`], routing through the
/// coordinate format when no direct path exists.
pub fn plan_tensor_conversion(
    src: FormatId,
    dst: FormatId,
    st: &TensorStats,
    hw: &HardwareConfig,
) -> Result<ConversionPlan> {
    for f in [src, dst] {
        if !f.is_tensor3_format() {
            return Err(Error::NotATensorFormat(f));
        }
    }
    if src == dst {
        return Ok(ConversionPlan::identity(src));
    }
    let compute = match direct_tensor_stages(src, dst, st, hw) {
        Some(stages) => stages,
        None => {
            let mut head = direct_tensor_stages(src, FormatId::Coo, st, hw)
                .ok_or(Error::NoConversionPath { from: src, to: dst })?;
            let tail = direct_tensor_stages(FormatId::Coo, dst, st, hw)
                .ok_or(Error::NoConversionPath { from: src, to: dst })?;
            head.extend(tail);
            head
        }
    };
    let mut s = Stages::new(hw);
    s.mem(tensor_words(src, st, hw));
    s.list.extend(compute);
    s.mem(tensor_words(dst, st, hw));
    Ok(ConversionPlan {
        src,
        dst,
        stages: s.list,
    })
}

/// Transpose a CSR encoding into CSC the way the hardware does it: histogram
/// the column ids, prefix-scan the histogram into per-column cursors, then
/// scatter each entry to its cursor. Visiting rows in order keeps every
/// column's row ids sorted without a comparison sort.
pub fn convert_csr_to_csc(a: &CsrMatrix) -> CscMatrix {
    let mut counts = vec![0u64; a.cols];
    for &j in &a.col_ids {
        counts[j] += 1;
    }
    let hw = HardwareConfig::default();
    let (inclusive, _) = super::prefix_sum(&counts, hw.prefix_variant, hw.prefix_width);
    let mut cursors: Vec<usize> = Vec::with_capacity(a.cols);
    cursors.push(0);
    cursors.extend(inclusive.iter().take(a.cols.saturating_sub(1)).map(|&x| x as usize));
    let nnz = a.nnz();
    let mut row_ids = vec![0usize; nnz];
    let mut values = vec![0.0f64; nnz];
    for i in 0..a.rows {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            let slot = cursors[j];
            row_ids[slot] = i;
            values[slot] = v;
            cursors[j] += 1;
        }
    }
    let mut col_ptr = Vec::with_capacity(a.cols + 1);
    col_ptr.push(0);
    col_ptr.extend(inclusive.iter().map(|&x| x as usize));
    CscMatrix {
        rows: a.rows,
        cols: a.cols,
        col_ptr,
        row_ids,
        values,
    }
}

/// Expand run-length pairs into coordinates: bump every run after the first
/// by one (the preceding value slot), prefix-scan the runs into absolute
/// linear positions, split those by the row width, and drop escape fillers.
pub fn convert_rlc_to_coo(r: &RlcMatrix) -> CooMatrix {
    let mut runs: Vec<u64> = Vec::with_capacity(r.pairs.len());
    for (n, (run, _)) in r.pairs.iter().enumerate() {
        runs.push(run + if n == 0 { 0 } else { 1 });
    }
    let hw = HardwareConfig::default();
    let (positions, _) = super::prefix_sum(&runs, hw.prefix_variant, hw.prefix_width);
    let mut entries = Vec::with_capacity(r.nnz());
    for (pos, (_, v)) in positions.into_iter().zip(&r.pairs) {
        if *v != 0.0 {
            let lin = pos as usize;
            entries.push((lin / r.cols, lin % r.cols, *v));
        }
    }
    CooMatrix::from_sorted_entries(r.rows, r.cols, entries)
}

/// Re-block a CSR encoding: each entry lands in block `(i / R, j / C)` at
/// local offset `(i % R, j % C)`; blocks with no entries are never stored.
pub fn convert_csr_to_bsr(a: &CsrMatrix, block: (usize, usize)) -> Result<BsrMatrix> {
    let (br, bc) = block;
    if br == 0 || bc == 0 {
        return Err(Error::InvalidConfig(
            "block dimensions must be positive".into(),
        ));
    }
    let grid_rows = a.rows.div_ceil(br);
    let mut block_row_ptr = Vec::with_capacity(grid_rows + 1);
    let mut block_col_ids = Vec::new();
    let mut block_values = Vec::new();
    block_row_ptr.push(0);
    for bi in 0..grid_rows {
        let mut blocks: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for i in bi * br..((bi + 1) * br).min(a.rows) {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let slot = blocks.entry(j / bc).or_insert_with(|| vec![0.0; br * bc]);
                slot[(i - bi * br) * bc + j % bc] = v;
            }
        }
        for (bj, vals) in blocks {
            block_col_ids.push(bj);
            block_values.extend_from_slice(&vals);
        }
        block_row_ptr.push(block_col_ids.len());
    }
    Ok(BsrMatrix {
        rows: a.rows,
        cols: a.cols,
        block_rows: br,
        block_cols: bc,
        block_row_ptr,
        block_col_ids,
        block_values,
    })
}

/// Build the fiber tree for a dense rank-3 operand under the given
/// level-to-mode order.
pub fn convert_dense_to_csf(d: &DenseTensor3, mode_order: [usize; 3]) -> Result<CsfTensor3> {
    CsfTensor3::from_dense(d, mode_order)
}

/// Lower any matrix encoding to sorted coordinates without materializing the
/// dense array.
pub(crate) fn to_coo(x: &FormattedMatrix) -> CooMatrix {
    let (rows, cols) = (x.rows(), x.cols());
    match x {
        FormattedMatrix::Coo(c) => c.clone(),
        FormattedMatrix::Rlc(r) => convert_rlc_to_coo(r),
        FormattedMatrix::Dense(d) => {
            CooMatrix::from_sorted_entries(rows, cols, d.nonzeros().collect())
        }
        FormattedMatrix::Csr(a) => {
            let mut entries = Vec::with_capacity(a.nnz());
            for i in 0..rows {
                let (ids, vals) = a.row(i);
                for (&j, &v) in ids.iter().zip(vals) {
                    entries.push((i, j, v));
                }
            }
            CooMatrix::from_sorted_entries(rows, cols, entries)
        }
        FormattedMatrix::Csc(a) => {
            let mut entries = Vec::with_capacity(a.nnz());
            for j in 0..cols {
                let (ids, vals) = a.col(j);
                for (&i, &v) in ids.iter().zip(vals) {
                    entries.push((i, j, v));
                }
            }
            entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
            CooMatrix::from_sorted_entries(rows, cols, entries)
        }
        FormattedMatrix::Zvc(z) => {
            let mut entries = Vec::with_capacity(z.nnz());
            let mut next = 0usize;
            for (lin, &present) in z.mask.iter().enumerate() {
                if present {
                    entries.push((lin / cols, lin % cols, z.values[next]));
                    next += 1;
                }
            }
            CooMatrix::from_sorted_entries(rows, cols, entries)
        }
        FormattedMatrix::Bsr(b) => {
            let mut entries = Vec::new();
            for bi in 0..b.block_row_ptr.len().saturating_sub(1) {
                for n in b.block_row_ptr[bi]..b.block_row_ptr[bi + 1] {
                    let bj = b.block_col_ids[n];
                    let vals = b.block(n);
                    for r in 0..b.block_rows {
                        for c in 0..b.block_cols {
                            let v = vals[r * b.block_cols + c];
                            let (i, j) = (bi * b.block_rows + r, bj * b.block_cols + c);
                            if v != 0.0 && i < rows && j < cols {
                                entries.push((i, j, v));
                            }
                        }
                    }
                }
            }
            entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
            CooMatrix::from_sorted_entries(rows, cols, entries)
        }
    }
}

/// Encode sorted coordinates into any matrix format, again sparsely: only
/// the dense and ZVC targets touch every cell, and only through their own
/// output arrays.
fn from_coo(c: &CooMatrix, dst: FormatId, params: &EncodeParams) -> Result<FormattedMatrix> {
    let (rows, cols) = (c.rows, c.cols);
    Ok(match dst {
        FormatId::Dense => FormattedMatrix::Dense(c.to_dense()),
        FormatId::Coo => FormattedMatrix::Coo(c.clone()),
        FormatId::Csr => {
            let mut row_ptr = vec![0usize; rows + 1];
            for &i in &c.row_ids {
                row_ptr[i + 1] += 1;
            }
            for i in 0..rows {
                row_ptr[i + 1] += row_ptr[i];
            }
            FormattedMatrix::Csr(CsrMatrix {
                rows,
                cols,
                row_ptr,
                col_ids: c.col_ids.clone(),
                values: c.values.clone(),
            })
        }
        FormatId::Csc => {
            let mut entries: Vec<(usize, usize, f64)> = c.entries().collect();
            entries.sort_unstable_by_key(|&(i, j, _)| (j, i));
            let mut col_ptr = vec![0usize; cols + 1];
            let mut row_ids = Vec::with_capacity(entries.len());
            let mut values = Vec::with_capacity(entries.len());
            for (i, j, v) in entries {
                col_ptr[j + 1] += 1;
                row_ids.push(i);
                values.push(v);
            }
            for j in 0..cols {
                col_ptr[j + 1] += col_ptr[j];
            }
            FormattedMatrix::Csc(CscMatrix {
                rows,
                cols,
                col_ptr,
                row_ids,
                values,
            })
        }
        FormatId::Zvc => {
            let mut mask = vec![false; rows * cols];
            for (i, j, _) in c.entries() {
                mask[i * cols + j] = true;
            }
            FormattedMatrix::Zvc(ZvcMatrix {
                rows,
                cols,
                mask,
                values: c.values.clone(),
            })
        }
        FormatId::Rlc => {
            let run_bits = params.run_bits;
            if run_bits == 0 || run_bits > 32 {
                return Err(Error::InvalidConfig(format!(
                    "run field width must be in 1..=32, got {run_bits}"
                )));
            }
            let max_run = (1u64 << run_bits) - 1;
            let mut pairs = Vec::with_capacity(c.nnz());
            let mut cursor = 0u64;
            for (i, j, v) in c.entries() {
                let lin = (i * cols + j) as u64;
                let mut gap = lin - cursor;
                while gap > max_run {
                    pairs.push((max_run, 0.0));
                    gap -= max_run + 1;
                }
                pairs.push((gap, v));
                cursor = lin + 1;
            }
            FormattedMatrix::Rlc(RlcMatrix {
                rows,
                cols,
                run_bits,
                pairs,
            })
        }
        FormatId::Bsr => {
            let (br, bc) = params.block;
            if br == 0 || bc == 0 {
                return Err(Error::InvalidConfig(
                    "block dimensions must be positive".into(),
                ));
            }
            let mut blocks: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
            for (i, j, v) in c.entries() {
                let slot = blocks
                    .entry((i / br, j / bc))
                    .or_insert_with(|| vec![0.0; br * bc]);
                slot[(i % br) * bc + (j % bc)] = v;
            }
            let grid_rows = rows.div_ceil(br);
            let mut block_row_ptr = Vec::with_capacity(grid_rows + 1);
            let mut block_col_ids = Vec::new();
            let mut block_values = Vec::new();
            block_row_ptr.push(0);
            let mut iter = blocks.into_iter().peekable();
            for bi in 0..grid_rows {
                while let Some(&((row, _), _)) = iter.peek() {
                    if row != bi {
                        break;
                    }
                    let ((_, bj), vals) = iter.next().expect("peeked entry exists");
                    block_col_ids.push(bj);
                    block_values.extend_from_slice(&vals);
                }
                block_row_ptr.push(block_col_ids.len());
            }
            FormattedMatrix::Bsr(BsrMatrix {
                rows,
                cols,
                block_rows: br,
                block_cols: bc,
                block_row_ptr,
                block_col_ids,
                block_values,
            })
        }
        other => return Err(Error::NotAMatrixFormat(other)),
    })
}

/// Encoding parameters that honor what the source instance was built with:
/// its own block shape and run width describe its storage, while the
/// requested parameters describe the destination.
fn effective_params(x: &FormattedMatrix, params: &EncodeParams) -> EncodeParams {
    let mut eff = *params;
    match x {
        FormattedMatrix::Bsr(b) => eff.block = (b.block_rows, b.block_cols),
        FormattedMatrix::Rlc(r) => eff.run_bits = r.run_bits,
        _ => {}
    }
    eff
}

/// Convert a matrix operand to `dst`, returning the re-encoded operand and
/// the modeled cost of the conversion pipeline. The identity conversion is
/// free; dedicated paths handle the pairs with specialized hardware routes
/// and everything else is routed through coordinates.
pub fn convert(
    x: &FormattedMatrix,
    dst: FormatId,
    hw: &HardwareConfig,
    params: &EncodeParams,
) -> Result<(FormattedMatrix, ConversionCost)> {
    let src = x.format();
    let eff = effective_params(x, params);
    let st = MatrixStats::from_matrix(x, &eff);
    let plan = plan_matrix_conversion(src, dst, &st, hw, &eff)?;
    let cost = conversion_cost(&plan, hw);
    let out = match (x, dst) {
        _ if src == dst => x.clone(),
        (FormattedMatrix::Csr(a), FormatId::Csc) => FormattedMatrix::Csc(convert_csr_to_csc(a)),
        (FormattedMatrix::Rlc(r), FormatId::Coo) => FormattedMatrix::Coo(convert_rlc_to_coo(r)),
        (FormattedMatrix::Csr(a), FormatId::Bsr) => {
            FormattedMatrix::Bsr(convert_csr_to_bsr(a, params.block)?)
        }
        _ => from_coo(&to_coo(x), dst, params)?,
    };
    Ok((out, cost))
}

/// Convert a rank-3 operand to `dst` with the modeled pipeline cost.
pub fn convert_tensor(
    x: &FormattedTensor3,
    dst: FormatId,
    hw: &HardwareConfig,
    params: &EncodeParams,
) -> Result<(FormattedTensor3, ConversionCost)> {
    let src = x.format();
    let st = TensorStats::from_tensor(x, params);
    let plan = plan_tensor_conversion(src, dst, &st, hw)?;
    let cost = conversion_cost(&plan, hw);
    if src == dst {
        return Ok((x.clone(), cost));
    }
    let mut entries = crate::kernels::tensor_entries(x);
    entries.sort_unstable_by_key(|&(idx, _)| idx);
    let dims = x.dims();
    let out = match dst {
        FormatId::Dense => {
            let mut d = DenseTensor3::zeros(dims);
            for (idx, v) in entries {
                d.set(idx, v);
            }
            FormattedTensor3::Dense(d)
        }
        FormatId::Coo => FormattedTensor3::Coo(CooTensor3::from_sorted_entries(dims, entries)),
        FormatId::Zvc => {
            let mut mask = vec![false; dims[0] * dims[1] * dims[2]];
            let mut values = Vec::with_capacity(entries.len());
            for ([i0, i1, i2], v) in entries {
                mask[(i0 * dims[1] + i1) * dims[2] + i2] = true;
                values.push(v);
            }
            FormattedTensor3::Zvc(ZvcTensor3 { dims, mask, values })
        }
        FormatId::Csf => {
            FormattedTensor3::Csf(CsfTensor3::from_entries(dims, params.mode_order, entries)?)
        }
        other => return Err(Error::NotATensorFormat(other)),
    };
    Ok((out, cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::testing::{example_matrix, example_tensor};
    use crate::formats::{from_dense_matrix, from_dense_tensor3, DenseMatrix};

    fn hw() -> HardwareConfig {
        HardwareConfig::default()
    }

    fn stage_kinds(plan: &ConversionPlan) -> Vec<String> {
        plan.stages.iter().map(|s| s.block.to_string()).collect()
    }

    #[test]
    fn transpose_matches_hand_worked_example() {
        let csr = CsrMatrix::from_dense(&example_matrix());
        let csc = convert_csr_to_csc(&csr);
        assert_eq!(csc.col_ptr, vec![0, 1, 2, 3, 4]);
        assert_eq!(csc.row_ids, vec![0, 2, 3, 0]);
        assert_eq!(csc.values, vec![5.0, 3.0, 1.0, 7.0]);
    }

    #[test]
    fn run_length_expansion_matches_hand_worked_example() {
        let rlc = RlcMatrix::from_dense(&example_matrix(), 4).unwrap();
        assert_eq!(rlc.pairs, vec![(0, 5.0), (2, 7.0), (5, 3.0), (4, 1.0)]);
        let coo = convert_rlc_to_coo(&rlc);
        assert_eq!(coo.row_ids, vec![0, 0, 2, 3]);
        assert_eq!(coo.col_ids, vec![0, 3, 1, 2]);
        assert_eq!(coo.values, vec![5.0, 7.0, 3.0, 1.0]);
    }

    #[test]
    fn blocking_matches_hand_worked_example() {
        let csr = CsrMatrix::from_dense(&example_matrix());
        let bsr = convert_csr_to_bsr(&csr, (2, 2)).unwrap();
        assert_eq!(bsr.block_row_ptr, vec![0, 2, 4]);
        assert_eq!(bsr.block_col_ids, vec![0, 1, 0, 1]);
        assert_eq!(bsr.block(0), &[5.0, 0.0, 0.0, 0.0]);
        assert_eq!(bsr.block(1), &[0.0, 7.0, 0.0, 0.0]);
        assert_eq!(bsr.block(2), &[0.0, 3.0, 0.0, 0.0]);
        assert_eq!(bsr.block(3), &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn fiber_tree_matches_hand_worked_example() {
        let csf = convert_dense_to_csf(&example_tensor(), [0, 1, 2]).unwrap();
        assert_eq!(csf.idx0, vec![0, 1]);
        assert_eq!(csf.ptr0, vec![0, 2, 3]);
        assert_eq!(csf.idx1, vec![0, 1, 0]);
        assert_eq!(csf.ptr1, vec![0, 1, 2, 3]);
        assert_eq!(csf.idx2, vec![0, 1, 1]);
        assert_eq!(csf.values, vec![2.0, 3.0, 4.0]);
    }

    #[test]
    fn every_matrix_pair_round_trips_through_convert() {
        let params = EncodeParams {
            block: (2, 2),
            ..EncodeParams::default()
        };
        let dense = example_matrix();
        for &src in &FormatId::MATRIX {
            let x = from_dense_matrix(&dense, src, &params).unwrap();
            for &dst in &FormatId::MATRIX {
                let (y, cost) = convert(&x, dst, &hw(), &params).unwrap();
                assert_eq!(y.format(), dst);
                assert_eq!(
                    y.to_dense(),
                    dense,
                    "round trip {src} -> {dst} changed the values"
                );
                if src == dst {
                    assert_eq!(cost.cycles, 0, "identity {src} should be free");
                } else {
                    assert!(cost.cycles > 0, "{src} -> {dst} should cost cycles");
                }
            }
        }
    }

    #[test]
    fn every_tensor_pair_round_trips_through_convert() {
        let params = EncodeParams::default();
        let dense = example_tensor();
        for &src in &FormatId::TENSOR3 {
            let x = from_dense_tensor3(&dense, src, &params).unwrap();
            for &dst in &FormatId::TENSOR3 {
                let (y, cost) = convert_tensor(&x, dst, &hw(), &params).unwrap();
                assert_eq!(y.format(), dst);
                assert_eq!(y.to_dense(), dense, "round trip {src} -> {dst}");
                if src == dst {
                    assert_eq!(cost.cycles, 0);
                }
            }
        }
    }

    #[test]
    fn dense_to_csr_plan_has_expected_stage_sequence() {
        let st = MatrixStats::estimate(4, 4, 4, &EncodeParams::default());
        let plan =
            plan_matrix_conversion(FormatId::Dense, FormatId::Csr, &st, &hw(), &EncodeParams::default())
                .unwrap();
        assert_eq!(
            stage_kinds(&plan),
            vec![
                "mem_controller",
                "comparators(8)",
                "prefix_sum(hp,32)",
                "mod(8)",
                "prefix_sum(hp,32)",
                "mem_controller",
            ]
        );
        // 16 cells in, 16 compares, 16 flags scanned, 4 remainders,
        // 5 pointer slots, 13 words out
        assert_eq!(plan.op_count(), 16 + 16 + 16 + 4 + 5 + 13);
    }

    #[test]
    fn empty_matrix_transposition_keeps_only_pointer_work() {
        let st = MatrixStats::estimate(3, 4, 0, &EncodeParams::default());
        let plan =
            plan_matrix_conversion(FormatId::Csr, FormatId::Csc, &st, &hw(), &EncodeParams::default())
                .unwrap();
        assert_eq!(
            stage_kinds(&plan),
            vec!["mem_controller", "prefix_sum(hp,32)", "mem_controller"]
        );
        let csr = CsrMatrix::from_dense(&DenseMatrix::zeros(3, 4));
        let csc = convert_csr_to_csc(&csr);
        assert_eq!(csc.col_ptr, vec![0, 0, 0, 0, 0]);
        assert!(csc.row_ids.is_empty());
    }

    #[test]
    fn hub_route_equals_direct_encode() {
        let dense = example_matrix();
        let zvc = from_dense_matrix(&dense, FormatId::Zvc, &EncodeParams::default()).unwrap();
        // ZVC -> CSC has no direct path and goes through coordinates.
        let (csc, cost) = convert(&zvc, FormatId::Csc, &hw(), &EncodeParams::default()).unwrap();
        let direct = from_dense_matrix(&dense, FormatId::Csc, &EncodeParams::default()).unwrap();
        assert_eq!(csc, direct);
        // one pipeline: a single fused plan, not two chained plans
        let sorters = cost
            .stages
            .iter()
            .filter(|s| matches!(s.block, BlockKind::Sorter { .. }))
            .count();
        assert_eq!(sorters, 1);
    }

    #[test]
    fn small_divider_batches_fit_in_one_cycle() {
        let dense = example_matrix();
        let rlc = from_dense_matrix(&dense, FormatId::Rlc, &EncodeParams::default()).unwrap();
        let (_, cost) = convert(&rlc, FormatId::Coo, &hw(), &EncodeParams::default()).unwrap();
        let div = cost
            .stages
            .iter()
            .find(|s| matches!(s.block, BlockKind::ParallelDiv { .. }))
            .expect("expansion divides positions by the row width");
        assert_eq!(div.elements, 4);
        assert_eq!(div.cycles, 1);
    }

    #[test]
    fn conversion_cycles_scale_subquadratically_in_nnz() {
        let params = EncodeParams::default();
        let small = MatrixStats::estimate(4096, 4096, 1000, &params);
        let big = MatrixStats::estimate(4096, 4096, 2000, &params);
        for (src, dst) in [
            (FormatId::Coo, FormatId::Csr),
            (FormatId::Csr, FormatId::Csc),
            (FormatId::Coo, FormatId::Rlc),
        ] {
            let a = conversion_cost(
                &plan_matrix_conversion(src, dst, &small, &hw(), &params).unwrap(),
                &hw(),
            );
            let b = conversion_cost(
                &plan_matrix_conversion(src, dst, &big, &hw(), &params).unwrap(),
                &hw(),
            );
            assert!(b.cycles >= a.cycles, "{src}->{dst} cycles should not shrink");
            assert!(
                (b.cycles as f64) <= 2.2 * a.cycles as f64,
                "{src}->{dst}: {} vs {} cycles",
                a.cycles,
                b.cycles
            );
        }
    }

    #[test]
    fn instance_parameters_override_requested_ones() {
        // a (2,2)-blocked instance keeps its own geometry when re-encoded,
        // even if the caller asks for (4,4) blocks elsewhere
        let params22 = EncodeParams {
            block: (2, 2),
            ..EncodeParams::default()
        };
        let bsr = from_dense_matrix(&example_matrix(), FormatId::Bsr, &params22).unwrap();
        let (coo, cost) = convert(&bsr, FormatId::Coo, &hw(), &EncodeParams::default()).unwrap();
        assert_eq!(coo.to_dense(), example_matrix());
        // 4 occupied (2,2) blocks: 16 block words + 4 ids + 3 pointers in
        let mem_in = cost.stages.first().expect("plan reads the source");
        assert!(matches!(mem_in.block, BlockKind::MemController));
        assert_eq!(mem_in.elements, 16 + 4 + 2 + 1);
    }

    #[test]
    fn planning_rejects_tensor_only_formats_for_matrices() {
        let st = MatrixStats::estimate(4, 4, 4, &EncodeParams::default());
        let err = plan_matrix_conversion(
            FormatId::Csf,
            FormatId::Csr,
            &st,
            &hw(),
            &EncodeParams::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotAMatrixFormat(FormatId::Csf)));
        let tst = TensorStats::estimate([4, 4, 4], 4, &EncodeParams::default());
        let err = plan_tensor_conversion(FormatId::Csr, FormatId::Csf, &tst, &hw()).unwrap_err();
        assert!(matches!(err, Error::NotATensorFormat(FormatId::Csr)));
    }

    #[test]
    fn tensor_fiber_tree_to_coordinates_round_trip() {
        let dense = example_tensor();
        let csf = from_dense_tensor3(&dense, FormatId::Csf, &EncodeParams::default()).unwrap();
        let (coo, _) = convert_tensor(&csf, FormatId::Coo, &hw(), &EncodeParams::default()).unwrap();
        match &coo {
            FormattedTensor3::Coo(c) => {
                assert_eq!(c.coords[0], vec![0, 0, 1]);
                assert_eq!(c.coords[1], vec![0, 1, 0]);
                assert_eq!(c.coords[2], vec![0, 1, 1]);
                assert_eq!(c.values, vec![2.0, 3.0, 4.0]);
            }
            other => panic!("expected coordinates, got {:?}", other.format()),
        }
    }

    #[test]
    fn wide_gaps_insert_escape_fillers_when_encoding_runs() {
        // single entry at linear position 40 with a 4-bit run field:
        // two fillers absorb 32 zeros, the value pair carries the final 8
        let coo = CooMatrix::from_sorted_entries(8, 8, vec![(5, 0, 9.0)]);
        let x = FormattedMatrix::Coo(coo);
        let (rlc, _) = convert(&x, FormatId::Rlc, &hw(), &EncodeParams::default()).unwrap();
        match rlc {
            FormattedMatrix::Rlc(r) => {
                assert_eq!(r.pairs, vec![(15, 0.0), (15, 0.0), (8, 9.0)]);
            }
            other => panic!("expected run-length pairs, got {:?}", other.format()),
        }
    }
}
