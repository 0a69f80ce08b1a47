//! Format recommendation. For a concrete workload this module enumerates
//! every admissible pairing of storage format (what each operand occupies
//! in DRAM) with compute format (what the accelerator datapath consumes),
//! prices each combination end to end — DRAM traffic, on-the-fly format
//! conversion, the weight-stationary compute itself, and the result
//! write-back — and ranks the combinations by energy-delay product.

mod catalog;

pub use catalog::{catalog_entry, CatalogEntry, CatalogShape, CATALOG};

use std::collections::HashMap;

use crate::cost::{
    dram_cost, storage_bits, storage_bits_tensor, HardwareConfig, MatrixStats, TensorStats,
    MCF_CANDIDATES,
};
use crate::error::{Error, Result};
use crate::formats::{EncodeParams, FormatId, FormattedMatrix, FormattedTensor3};
use crate::mint::{conversion_cost, plan_matrix_conversion, plan_tensor_conversion};
use crate::perf::{
    simulate_mttkrp_ws, simulate_spttm_ws, simulate_ws, SparsityProfile, TensorProfile,
};

/// The compute kernel a workload runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// Sparse-times-sparse matrix multiply, A streamed against stationary B.
    MatMul,
    /// Sparse tensor times dense matrix, contracting the last mode.
    SpTtm,
    /// Matricized tensor times Khatri-Rao product of two dense factors.
    Mttkrp,
}

/// A concrete workload: operand contents plus the kernel to run. Tensor
/// kernels carry the dense factor width; the factors themselves are
/// synthetic dense blocks, so only their shape matters.
#[derive(Debug, Clone)]
pub enum WorkloadSpec {
    MatMul {
        a: FormattedMatrix,
        b: FormattedMatrix,
    },
    SpTtm {
        tensor: FormattedTensor3,
        factor_cols: usize,
    },
    Mttkrp {
        tensor: FormattedTensor3,
        factor_cols: usize,
    },
}

impl WorkloadSpec {
    pub fn kernel(&self) -> KernelKind {
        match self {
            WorkloadSpec::MatMul { .. } => KernelKind::MatMul,
            WorkloadSpec::SpTtm { .. } => KernelKind::SpTtm,
            WorkloadSpec::Mttkrp { .. } => KernelKind::Mttkrp,
        }
    }
}

/// Streaming-side compute formats the bus packer understands.
pub const STREAM_ACF: [FormatId; 4] = [FormatId::Dense, FormatId::Csr, FormatId::Csc, FormatId::Coo];

/// Stationary-side compute formats the PE buffers understand.
pub const STATIONARY_ACF: [FormatId; 3] = [FormatId::Dense, FormatId::Csc, FormatId::Coo];

/// Storage formats considered for a rank-3 tensor operand.
pub const TENSOR_MCF: [FormatId; 4] = [FormatId::Dense, FormatId::Zvc, FormatId::Csf, FormatId::Coo];

/// Compute formats the tensor pipelines understand.
pub const TENSOR_ACF: [FormatId; 3] = [FormatId::Dense, FormatId::Csf, FormatId::Coo];

const DENSE_ONLY: [FormatId; 1] = [FormatId::Dense];

/// One point in the search space: storage format per input, compute format
/// per input, and the storage format the result is written back in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ComboChoice {
    pub mcf_a: FormatId,
    pub mcf_b: FormatId,
    pub acf_a: FormatId,
    pub acf_b: FormatId,
    pub mcf_out: FormatId,
}

/// Costs attributable to one operand under a chosen combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperandCost {
    pub mcf: FormatId,
    pub acf: FormatId,
    /// Resident size in DRAM under `mcf`.
    pub storage_bits: u64,
    pub dram_energy: f64,
    pub dram_cycles: u64,
    /// Converter pipeline cycles between `mcf` and `acf` (zero when they
    /// coincide). For the output operand this is the dense-to-`mcf`
    /// re-encode before write-back.
    pub conversion_cycles: u64,
    pub conversion_energy: f64,
}

/// Full cost of a workload under one format combination.
#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    pub combo: ComboChoice,
    pub a: OperandCost,
    pub b: OperandCost,
    pub output: OperandCost,
    pub compute_cycles: u64,
    pub compute_energy: f64,
    pub total_cycles: u64,
    pub total_energy: f64,
    /// total_energy times total_cycles; the ranking objective.
    pub edp: f64,
}

impl CostReport {
    /// Energy spent converting the two inputs from storage to compute
    /// format. The output re-encode is accounted separately because it
    /// overlaps the write-back stream rather than the input fetch.
    pub fn input_conversion_energy(&self) -> f64 {
        self.a.conversion_energy + self.b.conversion_energy
    }

    /// Input conversion energy as a fraction of total energy.
    pub fn input_conversion_share(&self) -> f64 {
        if self.total_energy > 0.0 {
            self.input_conversion_energy() / self.total_energy
        } else {
            0.0
        }
    }
}

/// Pins one or more storage formats during a search; `None` leaves the
/// dimension free.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct McfConstraint {
    pub a: Option<FormatId>,
    pub b: Option<FormatId>,
    pub out: Option<FormatId>,
}

/// Result of a search: the winning combination and the full ranking it was
/// drawn from, best first.
#[derive(Debug, Clone)]
pub struct Recommendation {
    pub best: CostReport,
    pub ranking: Vec<CostReport>,
}

fn candidate_sets(
    kernel: KernelKind,
) -> (
    &'static [FormatId],
    &'static [FormatId],
    &'static [FormatId],
    &'static [FormatId],
    &'static [FormatId],
) {
    match kernel {
        KernelKind::MatMul => (
            &MCF_CANDIDATES,
            &MCF_CANDIDATES,
            &STREAM_ACF,
            &STATIONARY_ACF,
            &MCF_CANDIDATES,
        ),
        KernelKind::SpTtm => (&TENSOR_MCF, &DENSE_ONLY, &TENSOR_ACF, &DENSE_ONLY, &TENSOR_MCF),
        KernelKind::Mttkrp => (
            &TENSOR_MCF,
            &DENSE_ONLY,
            &TENSOR_ACF,
            &DENSE_ONLY,
            &MCF_CANDIDATES,
        ),
    }
}

fn check_fixed(which: &str, fix: Option<FormatId>, set: &[FormatId]) -> Result<()> {
    if let Some(f) = fix {
        if !set.contains(&f) {
            return Err(Error::InvalidConfig(format!(
                "fixed storage format {f} is not a candidate for operand {which} of this kernel"
            )));
        }
    }
    Ok(())
}

/// Enumerate the admissible combinations for a kernel, in the fixed order
/// that also serves as the tie-break when two combinations cost the same.
fn enumerate_combos(kernel: KernelKind, fix: McfConstraint) -> Result<Vec<ComboChoice>> {
    let (set_a, set_b, set_acf_a, set_acf_b, set_out) = candidate_sets(kernel);
    check_fixed("A", fix.a, set_a)?;
    check_fixed("B", fix.b, set_b)?;
    check_fixed("out", fix.out, set_out)?;
    let keep = |fixed: Option<FormatId>, f: FormatId| fixed.is_none() || fixed == Some(f);
    let mut out = Vec::new();
    for &mcf_a in set_a {
        if !keep(fix.a, mcf_a) {
            continue;
        }
        for &mcf_b in set_b {
            if !keep(fix.b, mcf_b) {
                continue;
            }
            for &acf_a in set_acf_a {
                for &acf_b in set_acf_b {
                    for &mcf_out in set_out {
                        if !keep(fix.out, mcf_out) {
                            continue;
                        }
                        out.push(ComboChoice {
                            mcf_a,
                            mcf_b,
                            acf_a,
                            acf_b,
                            mcf_out,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Structural nonzero count of the matrix product: cell (i, j) is nonzero
/// iff some k has both A(i, k) and B(k, j) set. Cancellation is ignored,
/// matching what a write-back of the accumulated row actually stores.
fn matmul_output_nnz(a: &SparsityProfile, b: &SparsityProfile) -> usize {
    let n = b.cols;
    if n == 0 {
        return 0;
    }
    if b.nnz == b.rows * b.cols {
        let filled_rows = a.row_cols.iter().filter(|r| !r.is_empty()).count();
        return filled_rows * n;
    }
    let words = n.div_ceil(64);
    let mut b_rows = vec![vec![0u64; words]; b.rows];
    for (k, cols) in b.row_cols.iter().enumerate() {
        for &j in cols {
            b_rows[k][j / 64] |= 1 << (j % 64);
        }
    }
    let mut total = 0usize;
    let mut acc = vec![0u64; words];
    for cols in &a.row_cols {
        if cols.is_empty() {
            continue;
        }
        acc.fill(0);
        for &k in cols {
            for (w, bits) in b_rows[k].iter().enumerate() {
                acc[w] |= bits;
            }
        }
        total += acc.iter().map(|w| w.count_ones() as usize).sum::<usize>();
    }
    total
}

enum OutputShape {
    Matrix(MatrixStats),
    Tensor(TensorStats),
}

enum PreparedOps {
    Matrix {
        a: (MatrixStats, SparsityProfile),
        b: (MatrixStats, SparsityProfile),
    },
    Tensor {
        t: (TensorStats, TensorProfile),
        factor: MatrixStats,
        factor_cols: usize,
    },
}

/// Per-workload evaluator. Storage sizes, conversion plans, and compute
/// simulations are memoized, so ranking the full combination space costs
/// little more than the handful of distinct sub-evaluations it touches.
struct Prepared<'h> {
    hw: &'h HardwareConfig,
    params: EncodeParams,
    kernel: KernelKind,
    ops: PreparedOps,
    out: OutputShape,
    store_cache: HashMap<(u8, FormatId), u64>,
    conv_cache: HashMap<(u8, FormatId, FormatId), (u64, f64)>,
    compute_cache: HashMap<(FormatId, FormatId), (u64, f64)>,
}

const OP_A: u8 = 0;
const OP_B: u8 = 1;
const OP_OUT: u8 = 2;

impl<'h> Prepared<'h> {
    fn new(w: &WorkloadSpec, hw: &'h HardwareConfig) -> Result<Prepared<'h>> {
        let params = EncodeParams {
            run_bits: hw.run_bits,
            ..EncodeParams::default()
        };
        let (ops, out) = match w {
            WorkloadSpec::MatMul { a, b } => {
                if a.cols() != b.rows() {
                    return Err(Error::DimensionMismatch(format!(
                        "cannot multiply {}x{} by {}x{}",
                        a.rows(),
                        a.cols(),
                        b.rows(),
                        b.cols()
                    )));
                }
                let pa = SparsityProfile::from_matrix(a);
                let pb = SparsityProfile::from_matrix(b);
                let out_nnz = matmul_output_nnz(&pa, &pb);
                let out = MatrixStats::estimate(a.rows(), b.cols(), out_nnz, &params);
                let ops = PreparedOps::Matrix {
                    a: (MatrixStats::from_matrix(a, &params), pa),
                    b: (MatrixStats::from_matrix(b, &params), pb),
                };
                (ops, OutputShape::Matrix(out))
            }
            WorkloadSpec::SpTtm {
                tensor,
                factor_cols,
            }
            | WorkloadSpec::Mttkrp {
                tensor,
                factor_cols,
            } => {
                let f = *factor_cols;
                if f == 0 {
                    return Err(Error::InvalidConfig(
                        "factor width must be at least one column".into(),
                    ));
                }
                let profile = TensorProfile::from_tensor(tensor);
                let dims = profile.dims;
                let mut top: Vec<usize> = crate::kernels::tensor_entries(tensor)
                    .iter()
                    .map(|([i, _, _], _)| *i)
                    .collect();
                top.sort_unstable();
                top.dedup();
                let (distinct_slices, n_fibers) = (top.len(), profile.fibers.len());
                let out = match w.kernel() {
                    KernelKind::SpTtm => OutputShape::Tensor(TensorStats {
                        dims: [dims[0], dims[1], f],
                        nnz: n_fibers * f,
                        csf_nodes: [distinct_slices, n_fibers],
                    }),
                    _ => OutputShape::Matrix(MatrixStats::estimate(
                        dims[0],
                        f,
                        distinct_slices * f,
                        &params,
                    )),
                };
                let factor_rows = match w.kernel() {
                    KernelKind::SpTtm => dims[2],
                    _ => dims[1] + dims[2],
                };
                let factor =
                    MatrixStats::estimate(factor_rows, f, factor_rows.saturating_mul(f), &params);
                let ops = PreparedOps::Tensor {
                    t: (TensorStats::from_tensor(tensor, &params), profile),
                    factor,
                    factor_cols: f,
                };
                (ops, out)
            }
        };
        Ok(Prepared {
            hw,
            params,
            kernel: w.kernel(),
            ops,
            out,
            store_cache: HashMap::new(),
            conv_cache: HashMap::new(),
            compute_cache: HashMap::new(),
        })
    }

    /// DRAM-resident bits of one operand in the given storage format.
    fn operand_bits(&mut self, op: u8, fmt: FormatId) -> u64 {
        if let Some(&bits) = self.store_cache.get(&(op, fmt)) {
            return bits;
        }
        let bits = match (&self.ops, &self.out, op) {
            (PreparedOps::Matrix { a, .. }, _, OP_A) => {
                storage_bits(fmt, &a.0, self.hw, &self.params).total_bits()
            }
            (PreparedOps::Matrix { b, .. }, _, OP_B) => {
                storage_bits(fmt, &b.0, self.hw, &self.params).total_bits()
            }
            (PreparedOps::Tensor { t, .. }, _, OP_A) => {
                storage_bits_tensor(fmt, &t.0, self.hw, &self.params).total_bits()
            }
            (PreparedOps::Tensor { factor, .. }, _, OP_B) => {
                storage_bits(fmt, factor, self.hw, &self.params).total_bits()
            }
            (_, OutputShape::Matrix(s), _) => {
                storage_bits(fmt, s, self.hw, &self.params).total_bits()
            }
            (_, OutputShape::Tensor(s), _) => {
                storage_bits_tensor(fmt, s, self.hw, &self.params).total_bits()
            }
        };
        self.store_cache.insert((op, fmt), bits);
        bits
    }

    /// Converter cost to re-encode one operand from `src` to `dst`.
    fn converter(&mut self, op: u8, src: FormatId, dst: FormatId) -> Result<(u64, f64)> {
        if src == dst {
            return Ok((0, 0.0));
        }
        if let Some(&c) = self.conv_cache.get(&(op, src, dst)) {
            return Ok(c);
        }
        let plan = match (&self.ops, &self.out, op) {
            (PreparedOps::Matrix { a, .. }, _, OP_A) => {
                plan_matrix_conversion(src, dst, &a.0, self.hw, &self.params)?
            }
            (PreparedOps::Matrix { b, .. }, _, OP_B) => {
                plan_matrix_conversion(src, dst, &b.0, self.hw, &self.params)?
            }
            (PreparedOps::Tensor { t, .. }, _, OP_A) => {
                plan_tensor_conversion(src, dst, &t.0, self.hw)?
            }
            (PreparedOps::Tensor { factor, .. }, _, OP_B) => {
                plan_matrix_conversion(src, dst, factor, self.hw, &self.params)?
            }
            (_, OutputShape::Matrix(s), _) => {
                plan_matrix_conversion(src, dst, s, self.hw, &self.params)?
            }
            (_, OutputShape::Tensor(s), _) => plan_tensor_conversion(src, dst, s, self.hw)?,
        };
        let cost = conversion_cost(&plan, self.hw);
        let c = (cost.cycles, cost.energy);
        self.conv_cache.insert((op, src, dst), c);
        Ok(c)
    }

    fn compute(&mut self, acf_a: FormatId, acf_b: FormatId) -> Result<(u64, f64)> {
        if let Some(&c) = self.compute_cache.get(&(acf_a, acf_b)) {
            return Ok(c);
        }
        let report = match (&self.ops, self.kernel) {
            (PreparedOps::Matrix { a, b }, _) => simulate_ws(&a.1, &b.1, acf_a, acf_b, self.hw)?,
            (
                PreparedOps::Tensor {
                    t, factor_cols, ..
                },
                KernelKind::SpTtm,
            ) => simulate_spttm_ws(&t.1, *factor_cols, acf_a, self.hw)?,
            (
                PreparedOps::Tensor {
                    t, factor_cols, ..
                },
                _,
            ) => simulate_mttkrp_ws(&t.1, *factor_cols, acf_a, self.hw)?,
        };
        let c = (report.total_cycles, report.energy);
        self.compute_cache.insert((acf_a, acf_b), c);
        Ok(c)
    }

    fn operand_cost(
        &mut self,
        op: u8,
        mcf: FormatId,
        acf: FormatId,
        conv_src: FormatId,
        conv_dst: FormatId,
    ) -> Result<OperandCost> {
        let bits = self.operand_bits(op, mcf);
        let dram = dram_cost(bits, self.hw);
        let (conv_cycles, conv_energy) = self.converter(op, conv_src, conv_dst)?;
        Ok(OperandCost {
            mcf,
            acf,
            storage_bits: bits,
            dram_energy: dram.energy,
            dram_cycles: dram.cycles,
            conversion_cycles: conv_cycles,
            conversion_energy: conv_energy,
        })
    }

    fn evaluate(&mut self, combo: ComboChoice) -> Result<CostReport> {
        let a = self.operand_cost(OP_A, combo.mcf_a, combo.acf_a, combo.mcf_a, combo.acf_a)?;
        let b = self.operand_cost(OP_B, combo.mcf_b, combo.acf_b, combo.mcf_b, combo.acf_b)?;
        // The datapath emits the result dense; the write-back converter
        // re-encodes it into the chosen storage format.
        let output = self.operand_cost(
            OP_OUT,
            combo.mcf_out,
            FormatId::Dense,
            FormatId::Dense,
            combo.mcf_out,
        )?;
        let (compute_cycles, compute_energy) = self.compute(combo.acf_a, combo.acf_b)?;
        let overlap = self.hw.overlap_conversion;
        let input_dram = a.dram_cycles + b.dram_cycles;
        // Each input has its own converter consuming the transfer stream,
        // so overlapped conversion hides behind the whole transfer window
        // unless one converter is slower than the window itself.
        let input_cycles = if overlap {
            input_dram.max(a.conversion_cycles).max(b.conversion_cycles)
        } else {
            input_dram + a.conversion_cycles + b.conversion_cycles
        };
        let output_cycles = if overlap {
            output.dram_cycles.max(output.conversion_cycles)
        } else {
            output.dram_cycles + output.conversion_cycles
        };
        let total_cycles = input_cycles + compute_cycles + output_cycles;
        let total_energy = a.dram_energy
            + b.dram_energy
            + output.dram_energy
            + a.conversion_energy
            + b.conversion_energy
            + output.conversion_energy
            + compute_energy;
        Ok(CostReport {
            combo,
            a,
            b,
            output,
            compute_cycles,
            compute_energy,
            total_cycles,
            total_energy,
            edp: total_energy * total_cycles as f64,
        })
    }
}

/// Price a single format combination for a workload.
pub fn evaluate_combo(
    w: &WorkloadSpec,
    combo: ComboChoice,
    hw: &HardwareConfig,
) -> Result<CostReport> {
    hw.validate()?;
    Prepared::new(w, hw)?.evaluate(combo)
}

/// Search every admissible combination (honoring any pinned storage
/// formats) and rank by energy-delay product. Ties keep enumeration
/// order, so results are fully deterministic.
pub fn recommend(
    w: &WorkloadSpec,
    hw: &HardwareConfig,
    fix: McfConstraint,
) -> Result<Recommendation> {
    hw.validate()?;
    let mut prep = Prepared::new(w, hw)?;
    let combos = enumerate_combos(prep.kernel, fix)?;
    let mut ranking = Vec::with_capacity(combos.len());
    for combo in combos {
        ranking.push(prep.evaluate(combo)?);
    }
    ranking.sort_by(|x, y| x.edp.total_cmp(&y.edp));
    let best = ranking[0].clone();
    Ok(Recommendation { best, ranking })
}

/// Names of the fixed-strategy presets mirroring prior accelerator
/// designs: all-dense, compressed-sparse weights over a dense datapath,
/// zero-suppressed storage with flexible compute, storage locked to the
/// compute format, and flexible storage over a dense-only datapath.
pub const BASELINE_PRESETS: [&str; 5] = [
    "Fix_Fix_None",
    "Fix_Fix_None2",
    "Fix_Flex_HW",
    "Flex_Flex_None",
    "Flex_Fix_HW",
];

fn preset_matches(name: &str, kernel: KernelKind, c: &ComboChoice) -> bool {
    let tensor = kernel != KernelKind::MatMul;
    let sparse_fixed = if tensor { FormatId::Csf } else { FormatId::Csr };
    let d = FormatId::Dense;
    match name {
        "Fix_Fix_None" => {
            c.mcf_a == d && c.mcf_b == d && c.acf_a == d && c.acf_b == d && c.mcf_out == d
        }
        "Fix_Fix_None2" => {
            c.mcf_a == sparse_fixed
                && c.mcf_b == d
                && c.acf_a == sparse_fixed
                && c.acf_b == d
                && c.mcf_out == d
        }
        "Fix_Flex_HW" => c.mcf_a == FormatId::Zvc && (tensor || c.mcf_b == FormatId::Zvc),
        "Flex_Flex_None" => c.mcf_a == c.acf_a && c.mcf_b == c.acf_b && c.mcf_out == d,
        "Flex_Fix_HW" => c.acf_a == d && c.acf_b == d,
        _ => false,
    }
}

/// One full search compared against the fixed-strategy presets. Each
/// preset's row is the cheapest combination satisfying that preset's
/// restrictions; the last row, named `SAGE`, is the unrestricted winner.
#[derive(Debug, Clone)]
pub struct BaselineComparison {
    pub rows: Vec<(&'static str, CostReport)>,
}

impl BaselineComparison {
    pub fn get(&self, name: &str) -> Option<&CostReport> {
        self.rows.iter().find(|(n, _)| *n == name).map(|(_, r)| r)
    }

    /// The unrestricted recommendation.
    pub fn sage(&self) -> &CostReport {
        &self.rows.last().expect("comparison has rows").1
    }
}

pub fn baseline_compare(w: &WorkloadSpec, hw: &HardwareConfig) -> Result<BaselineComparison> {
    let kernel = w.kernel();
    let rec = recommend(w, hw, McfConstraint::default())?;
    let mut rows = Vec::with_capacity(BASELINE_PRESETS.len() + 1);
    for name in BASELINE_PRESETS {
        let report = rec
            .ranking
            .iter()
            .find(|r| preset_matches(name, kernel, &r.combo))
            .expect("every preset matches at least one enumerated combination")
            .clone();
        rows.push((name, report));
    }
    rows.push(("SAGE", rec.best));
    Ok(BaselineComparison { rows })
}
