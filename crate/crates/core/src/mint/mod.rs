//! Hardware format conversion: plans built from a small set of shared
//! building blocks, a pipelined cycle/energy model over those plans, and
//! functional converters whose results always match a decode/re-encode.
//!
//! Conversions without a handwritten direct path are composed through COO,
//! which every format can reach and leave cheaply; the composed stages are
//! costed as one pipeline.

mod blocks;
mod paths;

pub use blocks::{
    block_energy, block_latency, block_throughput_cycles, fill_latency, issue_interval,
    prefix_cycles, prefix_sum, BlockKind,
};
pub use paths::{
    convert, convert_csr_to_bsr, convert_csr_to_csc, convert_dense_to_csf, convert_rlc_to_coo,
    convert_tensor, plan_matrix_conversion, plan_tensor_conversion,
};
pub(crate) use paths::to_coo;

use crate::cost::HardwareConfig;
use crate::formats::FormatId;

/// One pipeline stage: a building block processing a known element count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanStage {
    pub block: BlockKind,
    pub elements: usize,
}

/// Ordered building-block stages realizing one format conversion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConversionPlan {
    pub src: FormatId,
    pub dst: FormatId,
    pub stages: Vec<PlanStage>,
}

impl ConversionPlan {
    pub fn identity(fmt: FormatId) -> Self {
        ConversionPlan {
            src: fmt,
            dst: fmt,
            stages: Vec::new(),
        }
    }

    /// Total building-block operations, the plan's complexity measure.
    pub fn op_count(&self) -> u64 {
        self.stages.iter().map(|s| s.elements as u64).sum()
    }
}

/// Cost of one stage inside an evaluated plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageCost {
    pub block: BlockKind,
    pub elements: usize,
    /// Steady-state throughput cycles of this stage alone.
    pub cycles: u64,
    pub energy: f64,
}

/// Evaluated cost of a conversion plan.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConversionCost {
    pub cycles: u64,
    pub energy: f64,
    pub stages: Vec<StageCost>,
}

impl ConversionCost {
    pub fn zero() -> Self {
        ConversionCost::default()
    }

    pub fn op_count(&self) -> u64 {
        self.stages.iter().map(|s| s.elements as u64).sum()
    }
}

/// Evaluate a plan under the pipelined model: stages run concurrently, so
/// total cycles are the bottleneck stage's throughput cycles plus every
/// stage's one-time fill latency. Energy is additive per stage.
pub fn conversion_cost(plan: &ConversionPlan, hw: &HardwareConfig) -> ConversionCost {
    let mut out = ConversionCost::zero();
    let mut bottleneck = 0u64;
    let mut fills = 0u64;
    for s in &plan.stages {
        let cycles = block_throughput_cycles(s.block, s.elements, hw);
        let energy = block_energy(s.block, s.elements, hw);
        bottleneck = bottleneck.max(cycles);
        fills += block_latency(s.block);
        out.energy += energy;
        out.stages.push(StageCost {
            block: s.block,
            elements: s.elements,
            cycles,
            energy,
        });
    }
    if !out.stages.is_empty() {
        out.cycles = bottleneck + fills;
    }
    out
}
