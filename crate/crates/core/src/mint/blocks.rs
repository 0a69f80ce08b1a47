//! Converter building blocks: the prefix-sum primitive in its three adder
//! topologies, and the block vocabulary conversion plans are written in.

use crate::cost::{HardwareConfig, PrefixVariant};
use std::fmt;

/// One hardware primitive inside the converter pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    PrefixSum { variant: PrefixVariant, width: usize },
    ParallelDiv { lanes: usize },
    ParallelMod { lanes: usize },
    Sorter { width: usize },
    ClusterCounter,
    Comparators { width: usize },
    MemController,
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockKind::PrefixSum { variant, width } => {
                let v = match variant {
                    PrefixVariant::SerialChain => "sc",
                    PrefixVariant::WorkEfficient => "we",
                    PrefixVariant::HighlyParallel => "hp",
                };
                write!(f, "prefix_sum({v},{width})")
            }
            BlockKind::ParallelDiv { lanes } => write!(f, "div({lanes})"),
            BlockKind::ParallelMod { lanes } => write!(f, "mod({lanes})"),
            BlockKind::Sorter { width } => write!(f, "sorter({width})"),
            BlockKind::ClusterCounter => write!(f, "cluster_counter"),
            BlockKind::Comparators { width } => write!(f, "comparators({width})"),
            BlockKind::MemController => write!(f, "mem_controller"),
        }
    }
}

/// Cycles between successive batch issues once the pipeline is full.
pub fn issue_interval(variant: PrefixVariant, width: usize) -> u64 {
    match variant {
        PrefixVariant::SerialChain => 1,
        PrefixVariant::WorkEfficient => (2 * ceil_log2_u(width)).max(1),
        PrefixVariant::HighlyParallel => 1,
    }
}

/// One-time pipeline fill latency before the first batch completes.
pub fn fill_latency(variant: PrefixVariant, width: usize) -> u64 {
    match variant {
        PrefixVariant::SerialChain => width as u64 + 1,
        PrefixVariant::WorkEfficient => 0,
        PrefixVariant::HighlyParallel => ceil_log2_u(width),
    }
}

/// Total cycles to scan `len` values through a width-`width` unit.
pub fn prefix_cycles(len: usize, variant: PrefixVariant, width: usize) -> u64 {
    if len == 0 {
        return 0;
    }
    let w = width.max(1);
    let batches = len.div_ceil(w) as u64;
    batches * issue_interval(variant, w) + fill_latency(variant, w)
}

fn ceil_log2_u(x: usize) -> u64 {
    crate::cost::ceil_log2(x.max(1)) as u64
}

/// Inclusive prefix sum with the cycle estimate of the chosen topology.
/// All three variants compute identical sums; input is consumed in batches
/// of `width` with a carry adder propagating the running offset.
pub fn prefix_sum(values: &[u64], variant: PrefixVariant, width: usize) -> (Vec<u64>, u64) {
    let w = width.max(1);
    let mut out = Vec::with_capacity(values.len());
    let mut offset = 0u64;
    for chunk in values.chunks(w) {
        let mut batch = chunk.to_vec();
        match variant {
            PrefixVariant::SerialChain => {
                let mut acc = 0u64;
                for x in batch.iter_mut() {
                    acc += *x;
                    *x = acc;
                }
            }
            PrefixVariant::WorkEfficient => blelloch_inclusive(&mut batch),
            PrefixVariant::HighlyParallel => kogge_stone(&mut batch),
        }
        for x in &batch {
            out.push(offset + *x);
        }
        offset += *batch.last().expect("chunks are non-empty");
    }
    (out, prefix_cycles(values.len(), variant, w))
}

/// Log-depth inclusive scan: every lane adds its `d`-away neighbor each
/// round, doubling `d`.
fn kogge_stone(a: &mut [u64]) {
    let mut d = 1;
    while d < a.len() {
        for i in (d..a.len()).rev() {
            a[i] += a[i - d];
        }
        d *= 2;
    }
}

/// Up-sweep/down-sweep scan on a power-of-two padded copy; the exclusive
/// result is turned inclusive by adding the inputs back.
fn blelloch_inclusive(batch: &mut Vec<u64>) {
    let orig = batch.clone();
    let n = batch.len().next_power_of_two();
    batch.resize(n, 0);
    let mut d = 1;
    while d < n {
        let mut i = 2 * d - 1;
        while i < n {
            batch[i] += batch[i - d];
            i += 2 * d;
        }
        d *= 2;
    }
    batch[n - 1] = 0;
    let mut d = n / 2;
    while d >= 1 {
        let mut i = 2 * d - 1;
        while i < n {
            let t = batch[i - d];
            batch[i - d] = batch[i];
            batch[i] += t;
            i += 2 * d;
        }
        d /= 2;
    }
    batch.truncate(orig.len());
    for (x, o) in batch.iter_mut().zip(&orig) {
        *x += o;
    }
}

/// Steady-state throughput cycles for `elements` through one block.
pub fn block_throughput_cycles(kind: BlockKind, elements: usize, hw: &HardwareConfig) -> u64 {
    if elements == 0 {
        return 0;
    }
    match kind {
        BlockKind::PrefixSum { variant, width } => {
            let w = width.max(1);
            elements.div_ceil(w) as u64 * issue_interval(variant, w)
        }
        BlockKind::ParallelDiv { lanes } | BlockKind::ParallelMod { lanes } => {
            elements.div_ceil(lanes.max(1)) as u64
        }
        BlockKind::Sorter { width } | BlockKind::Comparators { width } => {
            elements.div_ceil(width.max(1)) as u64
        }
        BlockKind::ClusterCounter => elements.div_ceil(hw.sorter_width.max(1)) as u64,
        BlockKind::MemController => elements.div_ceil(hw.mem_elems_per_cycle()) as u64,
    }
}

/// Pipeline fill contribution of one block.
pub fn block_latency(kind: BlockKind) -> u64 {
    match kind {
        BlockKind::PrefixSum { variant, width } => fill_latency(variant, width.max(1)).max(1),
        _ => 1,
    }
}

/// Energy of pushing `elements` through one block, in model units.
/// Dividers and mod units carry a 4x weight (they dominate converter area
/// and power). Memory controllers pace the pipeline but charge nothing
/// here: the words they move are already billed by the DRAM-interface and
/// bus-delivery models, and double-charging that movement would let
/// streaming overhead drown out the transform logic being compared.
pub fn block_energy(kind: BlockKind, elements: usize, hw: &HardwareConfig) -> f64 {
    let per_op = match kind {
        BlockKind::ParallelDiv { .. } | BlockKind::ParallelMod { .. } => 4.0 * hw.e_conv_op,
        BlockKind::MemController => 0.0,
        _ => hw.e_conv_op,
    };
    elements as f64 * per_op * hw.mint_variant.energy_factor()
}
