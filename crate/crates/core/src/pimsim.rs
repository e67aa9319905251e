//! Analytic cost model of a DPU-based processing-in-memory platform.
//!
//! The simulator is closed-form, not trace-driven: the kernels are regular
//! enough that instruction counts are derivable, which keeps the model
//! auditable and fast. Three ingredients:
//!
//! * a [`DpuModel`] with memory sizes and the thread pipeline,
//! * a [`CostTable`] with per-instruction-class cycle costs,
//! * a [`PlatformModel`] with rank/DPU counts and the host link rate.
//!
//! Compute time follows the round-robin thread pipeline: a lone thread
//! issues one instruction every `pipeline_saturation_threads` cycles (the
//! first and last three of the fourteen stages overlap), so wall cycles
//! for instruction-weighted work `I` spread over `T` threads are
//! `ceil(I * sat / min(T, sat))`. MRAM DMA is serialized per DPU and never
//! overlaps compute, modeled as setup plus a bytes-per-cycle stream.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::config::parse_kv;
use crate::error::Error as CoreError;
use crate::ntt::Threading;

/// Kernel classes the simulator prices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum KernelKind {
    Ntt,
    Intt,
    PointwiseMul,
    PointwiseAdd,
    BgvMul,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Ntt => "ntt",
            KernelKind::Intt => "intt",
            KernelKind::PointwiseMul => "mul",
            KernelKind::PointwiseAdd => "add",
            KernelKind::BgvMul => "bgvmul",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ntt" => Some(KernelKind::Ntt),
            "intt" => Some(KernelKind::Intt),
            "mul" => Some(KernelKind::PointwiseMul),
            "add" => Some(KernelKind::PointwiseAdd),
            "bgvmul" => Some(KernelKind::BgvMul),
            _ => None,
        }
    }
}

/// How moduli are spread over the machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Each DPU group is configured for one modulus (no reconfiguration).
    ModulusParallel,
    /// All DPUs process every modulus in turn, one round per modulus.
    ModulusSequential,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::ModulusParallel => "parallel",
            Strategy::ModulusSequential => "sequential",
        }
    }
}

/// Per-DPU capacities and pipeline shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpuModel {
    pub mram_bytes: u64,
    /// Runtime reservation (logging, stack) carved out of MRAM.
    pub reserved_bytes: u64,
    pub wram_bytes: u64,
    pub hw_threads: u32,
    /// Threads needed to keep the pipeline issuing every cycle.
    pub pipeline_saturation_threads: u32,
    pub pipeline_stages: u32,
    pub clock_hz: u64,
}

impl Default for DpuModel {
    fn default() -> Self {
        Self {
            mram_bytes: 64 << 20,
            reserved_bytes: 4 << 20,
            wram_bytes: 64 << 10,
            hw_threads: 16,
            pipeline_saturation_threads: 11,
            pipeline_stages: 14,
            clock_hz: 400_000_000,
        }
    }
}

impl DpuModel {
    pub fn validate(&self) -> Result<(), PlanError> {
        if self.reserved_bytes >= self.mram_bytes {
            return Err(PlanError::BadModel(
                "reserved_bytes must be below mram_bytes".into(),
            ));
        }
        if self.pipeline_saturation_threads == 0
            || self.pipeline_saturation_threads > self.hw_threads
        {
            return Err(PlanError::BadModel(
                "pipeline saturation must be in 1..=hw_threads".into(),
            ));
        }
        Ok(())
    }

    pub fn apply_config(&mut self, text: &str) -> Result<(), CoreError> {
        for ((key, value), line) in parse_kv(text)? {
            let parse = |v: &str| -> Result<u64, CoreError> {
                v.parse().map_err(|_| CoreError::BadConfig {
                    line,
                    reason: format!("bad integer '{v}' for {key}"),
                })
            };
            match key.as_str() {
                "mram_bytes" => self.mram_bytes = parse(&value)?,
                "reserved_bytes" => self.reserved_bytes = parse(&value)?,
                "wram_bytes" => self.wram_bytes = parse(&value)?,
                "hw_threads" => self.hw_threads = parse(&value)? as u32,
                "pipeline_saturation_threads" => {
                    self.pipeline_saturation_threads = parse(&value)? as u32
                }
                "pipeline_stages" => self.pipeline_stages = parse(&value)? as u32,
                "clock_hz" => self.clock_hz = parse(&value)?,
                _ => {}
            }
        }
        Ok(())
    }
}

/// Which multiplication routines the kernels are priced with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MulPreset {
    /// Hand-written 35/21-cycle routines.
    Custom,
    /// 4/2-cycle dummy routines (what-if: faster multiplier hardware).
    Dummy,
    /// One-cycle multiplications, inlined (no call overhead).
    Optimistic,
}

impl MulPreset {
    pub fn name(self) -> &'static str {
        match self {
            MulPreset::Custom => "default",
            MulPreset::Dummy => "dummy",
            MulPreset::Optimistic => "optimistic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "default" | "custom" => Some(MulPreset::Custom),
            "dummy" => Some(MulPreset::Dummy),
            "optimistic" => Some(MulPreset::Optimistic),
            _ => None,
        }
    }
}

/// Cycle costs per instruction class, plus the DMA stream parameters.
///
/// The native multiplication entries are reference points for what-if
/// comparisons; the kernel formulas always price the selected preset's
/// routines. `mul64_native` defaults to 60 cycles (the 35-cycle custom
/// routine being ~70% faster); the measured worst-case ratio preset of 134
/// cycles is available as [`CostTable::MUL64_NATIVE_MEASURED`].
#[derive(Debug, Clone, PartialEq)]
pub struct CostTable {
    pub preset: MulPreset,
    pub add_sub_logic: u64,
    pub mul8: u64,
    pub mul32_native_worst: u64,
    pub mul64_native: u64,
    pub mul32x32_to_64_custom: u64,
    pub mul32x32_to_32_custom: u64,
    pub dummy_mul32: u64,
    pub dummy_mul64: u64,
    pub optimistic_mul: u64,
    /// Call/return overhead per multiplication routine invocation; zero
    /// when the routines are inlined (the optimistic preset).
    pub mul_call_overhead: u64,
    /// Loads, stores, and loop/address bookkeeping per butterfly.
    pub butterfly_overhead: u64,
    /// The same bookkeeping per element of a pointwise kernel.
    pub elementwise_overhead: u64,
    pub dma_setup_cycles: u64,
    pub dma_bytes_per_cycle: u64,
}

impl Default for CostTable {
    fn default() -> Self {
        Self {
            preset: MulPreset::Custom,
            add_sub_logic: 1,
            mul8: 1,
            mul32_native_worst: 43,
            mul64_native: 60,
            mul32x32_to_64_custom: 35,
            mul32x32_to_32_custom: 21,
            dummy_mul32: 2,
            dummy_mul64: 4,
            optimistic_mul: 1,
            mul_call_overhead: 5,
            butterfly_overhead: 21,
            elementwise_overhead: 8,
            dma_setup_cycles: 64,
            dma_bytes_per_cycle: 2,
        }
    }
}

impl CostTable {
    /// Measured worst-case native 64-bit multiplication (134x the 8-bit
    /// hardware multiply), the alternative to the 60-cycle default.
    pub const MUL64_NATIVE_MEASURED: u64 = 134;

    pub fn with_preset(preset: MulPreset) -> Self {
        Self {
            preset,
            ..Self::default()
        }
    }

    pub fn dummy() -> Self {
        Self::with_preset(MulPreset::Dummy)
    }

    pub fn optimistic() -> Self {
        Self::with_preset(MulPreset::Optimistic)
    }

    /// Selected 32x32 -> 64-bit multiplication cost.
    pub fn mul64_cycles(&self) -> u64 {
        match self.preset {
            MulPreset::Custom => self.mul32x32_to_64_custom,
            MulPreset::Dummy => self.dummy_mul64,
            MulPreset::Optimistic => self.optimistic_mul,
        }
    }

    /// Selected 32x32 -> 32-bit multiplication cost.
    pub fn mul32_cycles(&self) -> u64 {
        match self.preset {
            MulPreset::Custom => self.mul32x32_to_32_custom,
            MulPreset::Dummy => self.dummy_mul32,
            MulPreset::Optimistic => self.optimistic_mul,
        }
    }

    fn call_overhead(&self) -> u64 {
        match self.preset {
            MulPreset::Optimistic => 0,
            _ => self.mul_call_overhead,
        }
    }

    /// One modular multiplication: the raw wide product, then Barrett's
    /// two multiplications (quotient estimate wide, `q*p` low) with their
    /// shift/correction adds.
    pub fn modmul_cycles(&self) -> u64 {
        2 * self.mul64_cycles() + self.mul32_cycles() + 3 * self.call_overhead()
            + 2 * self.add_sub_logic
    }

    /// One modular addition (add plus conditional correction).
    pub fn modadd_cycles(&self) -> u64 {
        2 * self.add_sub_logic
    }

    /// One butterfly: modular multiply, add, subtract, bookkeeping.
    pub fn butterfly_cycles(&self) -> u64 {
        self.modmul_cycles() + 2 * self.add_sub_logic + self.butterfly_overhead
    }

    pub fn apply_config(&mut self, text: &str) -> Result<(), CoreError> {
        for ((key, value), line) in parse_kv(text)? {
            let parse = |v: &str| -> Result<u64, CoreError> {
                v.parse().map_err(|_| CoreError::BadConfig {
                    line,
                    reason: format!("bad integer '{v}' for {key}"),
                })
            };
            match key.as_str() {
                "add_sub_logic" => self.add_sub_logic = parse(&value)?,
                "mul8" => self.mul8 = parse(&value)?,
                "mul32_native_worst" => self.mul32_native_worst = parse(&value)?,
                "mul64_native" => self.mul64_native = parse(&value)?,
                "mul32x32_to_64_custom" => self.mul32x32_to_64_custom = parse(&value)?,
                "mul32x32_to_32_custom" => self.mul32x32_to_32_custom = parse(&value)?,
                "dummy_mul32" => self.dummy_mul32 = parse(&value)?,
                "dummy_mul64" => self.dummy_mul64 = parse(&value)?,
                "optimistic_mul" => self.optimistic_mul = parse(&value)?,
                "mul_call_overhead" => self.mul_call_overhead = parse(&value)?,
                "butterfly_overhead" => self.butterfly_overhead = parse(&value)?,
                "elementwise_overhead" => self.elementwise_overhead = parse(&value)?,
                "dma_setup_cycles" => self.dma_setup_cycles = parse(&value)?,
                "dma_bytes_per_cycle" => self.dma_bytes_per_cycle = parse(&value)?,
                "preset" => {
                    self.preset = MulPreset::parse(&value).ok_or(CoreError::BadConfig {
                        line,
                        reason: format!("unknown preset '{value}'"),
                    })?
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// The machine: ranks of DPUs and the host link.
#[derive(Debug, Clone, PartialEq)]
pub struct PlatformModel {
    pub dpus_per_rank: u32,
    pub ranks: u32,
    /// Ranks times DPUs-per-rank minus defective units.
    pub usable_dpus: u32,
    /// Host <-> DPU copy rate; a calibration parameter, not a measurement.
    pub host_link_bytes_per_second: f64,
}

impl Default for PlatformModel {
    fn default() -> Self {
        // The reference machine: 8 ranks, 512 DPUs, 509 usable.
        Self {
            dpus_per_rank: 64,
            ranks: 8,
            usable_dpus: 509,
            host_link_bytes_per_second: 2.0e9,
        }
    }
}

impl PlatformModel {
    pub fn with_dpus(usable_dpus: u32) -> Self {
        let mut p = Self::default();
        p.usable_dpus = usable_dpus;
        p.ranks = usable_dpus.div_ceil(p.dpus_per_rank);
        p
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        if self.usable_dpus == 0 || self.usable_dpus > self.ranks * self.dpus_per_rank {
            return Err(PlanError::BadModel(format!(
                "usable_dpus {} exceeds ranks*dpus_per_rank {}",
                self.usable_dpus,
                self.ranks * self.dpus_per_rank
            )));
        }
        Ok(())
    }

    pub fn apply_config(&mut self, text: &str) -> Result<(), CoreError> {
        for ((key, value), line) in parse_kv(text)? {
            match key.as_str() {
                "dpus_per_rank" | "ranks" | "usable_dpus" => {
                    let v: u32 = value.parse().map_err(|_| CoreError::BadConfig {
                        line,
                        reason: format!("bad integer '{value}' for {key}"),
                    })?;
                    match key.as_str() {
                        "dpus_per_rank" => self.dpus_per_rank = v,
                        "ranks" => self.ranks = v,
                        _ => self.usable_dpus = v,
                    }
                }
                "host_link_bytes_per_second" => {
                    self.host_link_bytes_per_second =
                        value.parse().map_err(|_| CoreError::BadConfig {
                            line,
                            reason: format!("bad number '{value}' for {key}"),
                        })?
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Work-planning failures.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanError {
    #[error(
        "modulus-parallel needs at least {needed} DPUs for {needed} moduli, \
         only {usable} usable; use the modulus-sequential strategy instead"
    )]
    TooFewDpus { usable: u32, needed: u32 },

    #[error("inconsistent platform or DPU model: {0}")]
    BadModel(String),

    #[error("workload is empty (no ciphertexts or no moduli)")]
    EmptyWorkload,
}

/// One `(ciphertext, modulus)` unit of work, tagged with the execution
/// round it runs in (always 0 under the parallel strategy; the modulus
/// ordinal under the sequential one).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorkItem {
    pub ciphertext: u32,
    pub modulus: u32,
    pub round: u32,
}

/// A complete assignment of `(ciphertext, modulus)` items to DPUs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkPlan {
    pub strategy: Strategy,
    /// Items per DPU, indexed by DPU.
    pub assignment: Vec<Vec<WorkItem>>,
    /// Group sizes per modulus (parallel strategy only).
    pub group_sizes: Vec<u32>,
    /// True when the parallel groups could not be made equal.
    pub imbalanced: bool,
    /// Execution rounds (1 for parallel, k for sequential).
    pub rounds: u32,
    /// Threading for transform kernels (NTT/iNTT).
    pub transform_threading: Threading,
    /// Threading for element-wise kernels.
    pub elementwise_threading: Threading,
}

impl WorkPlan {
    pub fn num_dpus(&self) -> usize {
        self.assignment.len()
    }

    fn threading_for(&self, kind: KernelKind) -> Threading {
        match kind {
            KernelKind::Ntt | KernelKind::Intt => self.transform_threading,
            _ => self.elementwise_threading,
        }
    }
}

/// Partitions `num_ciphertexts * base_size` items over the usable DPUs.
///
/// Modulus-parallel: DPUs split into `base_size` groups, as evenly as
/// possible (whole ranks fall out naturally when the rank count divides),
/// and each group's ciphertexts are round-robined over its DPUs.
/// Modulus-sequential: every modulus is a round over all DPUs.
pub fn plan_work(
    num_ciphertexts: u32,
    base_size: usize,
    platform: &PlatformModel,
    strategy: Strategy,
) -> Result<WorkPlan, PlanError> {
    platform.validate()?;
    if num_ciphertexts == 0 || base_size == 0 {
        return Err(PlanError::EmptyWorkload);
    }
    let d = platform.usable_dpus;
    let k = base_size as u32;
    let mut assignment = vec![Vec::new(); d as usize];
    let mut group_sizes = Vec::new();
    let mut imbalanced = false;
    let rounds;

    match strategy {
        Strategy::ModulusParallel => {
            if d < k {
                return Err(PlanError::TooFewDpus {
                    usable: d,
                    needed: k,
                });
            }
            let quot = d / k;
            let rem = d % k;
            imbalanced = rem != 0;
            let mut start = 0u32;
            for modulus in 0..k {
                let size = quot + if modulus < rem { 1 } else { 0 };
                group_sizes.push(size);
                for ct in 0..num_ciphertexts {
                    let dpu = start + ct % size;
                    assignment[dpu as usize].push(WorkItem {
                        ciphertext: ct,
                        modulus,
                        round: 0,
                    });
                }
                start += size;
            }
            rounds = 1;
        }
        Strategy::ModulusSequential => {
            for modulus in 0..k {
                for ct in 0..num_ciphertexts {
                    let dpu = ct % d;
                    assignment[dpu as usize].push(WorkItem {
                        ciphertext: ct,
                        modulus,
                        round: modulus,
                    });
                }
            }
            rounds = k;
        }
    }

    Ok(WorkPlan {
        strategy,
        assignment,
        group_sizes,
        imbalanced,
        rounds,
        transform_threading: Threading::CoarseGrained,
        elementwise_threading: Threading::FineGrained,
    })
}

/// The strategy the benchmarks pick by default: modulus-parallel when the
/// rank count divides by the base size (groups fall on whole ranks),
/// sequential otherwise.
pub fn auto_strategy(ranks: u32, base_size: usize) -> Strategy {
    if base_size > 0 && (ranks as usize).is_multiple_of(base_size) {
        Strategy::ModulusParallel
    } else {
        Strategy::ModulusSequential
    }
}

/// Cycle cost of one kernel batch on one DPU, split into compute and DMA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KernelCost {
    pub compute_cycles: u64,
    pub dma_cycles: u64,
}

impl KernelCost {
    pub fn total(self) -> u64 {
        self.compute_cycles + self.dma_cycles
    }
}

/// Instruction-cycle weight of a single kernel unit (one sub-polynomial
/// transform, one pointwise pass, or one composite BGV multiply).
pub fn unit_instruction_cycles(kind: KernelKind, n: usize, cost: &CostTable) -> u64 {
    let n64 = n as u64;
    let log2n = n.trailing_zeros() as u64;
    let butterflies = n64 / 2 * log2n;
    let pmul = n64 * (cost.modmul_cycles() + cost.elementwise_overhead);
    let padd = n64 * (cost.modadd_cycles() + cost.elementwise_overhead);
    match kind {
        KernelKind::Ntt => butterflies * cost.butterfly_cycles(),
        // The inverse adds the final n^-1 scaling pass.
        KernelKind::Intt => butterflies * cost.butterfly_cycles() + pmul,
        KernelKind::PointwiseMul => pmul,
        KernelKind::PointwiseAdd => padd,
        KernelKind::BgvMul => 4 * pmul + padd,
    }
}

/// MRAM traffic of one kernel unit: `(dma transfers, bytes)`.
fn unit_dma(kind: KernelKind, n: usize) -> (u64, u64) {
    let sub = 4 * n as u64;
    match kind {
        // One sub-polynomial streamed in and back out.
        KernelKind::Ntt | KernelKind::Intt => (2, 2 * sub),
        // Two operands in, one result out.
        KernelKind::PointwiseMul | KernelKind::PointwiseAdd => (3, 3 * sub),
        // Four inputs in, three outputs out.
        KernelKind::BgvMul => (7, 7 * sub),
    }
}

/// Cycles for `units` kernel units of `kind` resident on one DPU.
///
/// Compute: `ceil(units * unit_cycles * sat / min(T, sat))`, with
/// `T = min(units, hw_threads)` coarse-grained (one thread per unit) and
/// `T = hw_threads` fine-grained (threads split each unit). DMA is
/// serialized and added on top, never overlapped.
pub fn kernel_cost(
    kind: KernelKind,
    n: usize,
    units_on_dpu: u64,
    threading: Threading,
    cost: &CostTable,
    model: &DpuModel,
) -> KernelCost {
    assert!(n.is_power_of_two(), "polynomial length must be a power of two");
    if units_on_dpu == 0 {
        return KernelCost::default();
    }
    let sat = model.pipeline_saturation_threads as u64;
    let active = match threading {
        Threading::CoarseGrained => units_on_dpu.min(model.hw_threads as u64),
        Threading::FineGrained => model.hw_threads as u64,
    };
    let eff = active.min(sat).max(1);
    let work = units_on_dpu * unit_instruction_cycles(kind, n, cost) * sat;
    let compute_cycles = work.div_ceil(eff);

    let (transfers, bytes) = unit_dma(kind, n);
    let dma_cycles = units_on_dpu
        * (transfers * cost.dma_setup_cycles + bytes.div_ceil(cost.dma_bytes_per_cycle));
    KernelCost {
        compute_cycles,
        dma_cycles,
    }
}

/// Maximum sub-polynomials of length `n` one DPU can hold:
/// `(mram - reserved) / 4n` minus the twiddle-and-header footprint, which
/// is about two sub-polynomials (forward plus inverse tables).
pub fn capacity(n: usize, model: &DpuModel) -> u64 {
    assert!(n.is_power_of_two());
    let usable = model.mram_bytes.saturating_sub(model.reserved_bytes);
    (usable / (4 * n as u64)).saturating_sub(2)
}

/// Timing of one simulated workload.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub per_dpu_cycles: Vec<u64>,
    /// Max over the per-DPU totals.
    pub makespan_cycles: u64,
    pub compute_seconds: f64,
    pub transfer_seconds: f64,
    pub retrieval_seconds: f64,
    /// Max-across-DPUs cycles per phase, in phase order.
    pub phase_breakdown: Vec<(KernelKind, u64)>,
    pub strategy: Strategy,
    pub imbalanced: bool,
    pub rounds: u32,
    pub preset: MulPreset,
    /// Disclosed model constant: bookkeeping cycles charged per butterfly.
    pub butterfly_overhead: u64,
}

/// Sub-polynomials each `(ciphertext, modulus)` item carries through the
/// phase list. Phase lists containing a binary kernel (pointwise or BGV)
/// treat the item as a multiplication instance holding a ciphertext PAIR
/// (four polynomials); transform-only lists treat it as one ciphertext
/// (two polynomials).
fn phase_poly_counts(phases: &[KernelKind]) -> (u64, Vec<u64>, u64) {
    let pair_mode = phases.iter().any(|p| {
        matches!(
            p,
            KernelKind::BgvMul | KernelKind::PointwiseMul | KernelKind::PointwiseAdd
        )
    });
    let input_polys: u64 = if pair_mode { 4 } else { 2 };
    let mut current = input_polys;
    let mut kernels_per_phase = Vec::with_capacity(phases.len());
    for &phase in phases {
        match phase {
            KernelKind::Ntt | KernelKind::Intt => kernels_per_phase.push(current),
            KernelKind::PointwiseMul | KernelKind::PointwiseAdd => {
                kernels_per_phase.push(2);
                current = 2;
            }
            KernelKind::BgvMul => {
                kernels_per_phase.push(1);
                current = 3;
            }
        }
    }
    (input_polys, kernels_per_phase, current)
}

/// Runs the plan through the phases and accounts cycles per DPU plus the
/// host transfer both ways. Makespan is the maximum per-DPU total;
/// inter-round barrier waits are not charged.
pub fn simulate(
    plan: &WorkPlan,
    phases: &[KernelKind],
    n: usize,
    cost: &CostTable,
    model: &DpuModel,
    platform: &PlatformModel,
) -> SimReport {
    let (input_polys, kernels_per_phase, output_polys) = phase_poly_counts(phases);
    let mut per_dpu = vec![0u64; plan.num_dpus()];
    let mut phase_max: Vec<(KernelKind, u64)> =
        phases.iter().map(|&p| (p, 0)).collect();

    let mut total_items: u64 = 0;
    for (dpu, items) in plan.assignment.iter().enumerate() {
        total_items += items.len() as u64;
        let mut per_round: BTreeMap<u32, u64> = BTreeMap::new();
        for item in items {
            *per_round.entry(item.round).or_insert(0) += 1;
        }
        let mut phase_acc = vec![0u64; phases.len()];
        for (&round, &item_count) in &per_round {
            // A sequential round beyond the first re-fetches this round's
            // twiddle tables (forward + inverse, 4n bytes each).
            if round > 0 {
                per_dpu[dpu] += cost.dma_setup_cycles
                    + (8 * n as u64).div_ceil(cost.dma_bytes_per_cycle);
            }
            for (phase_idx, &phase) in phases.iter().enumerate() {
                let units = item_count * kernels_per_phase[phase_idx];
                let kc = kernel_cost(
                    phase,
                    n,
                    units,
                    plan.threading_for(phase),
                    cost,
                    model,
                );
                per_dpu[dpu] += kc.total();
                phase_acc[phase_idx] += kc.total();
            }
        }
        for (phase_idx, &acc) in phase_acc.iter().enumerate() {
            let entry = &mut phase_max[phase_idx].1;
            *entry = (*entry).max(acc);
        }
    }

    let makespan_cycles = per_dpu.iter().copied().max().unwrap_or(0);
    let sub_bytes = 4 * n as u64;
    let transfer_bytes = total_items * input_polys * sub_bytes;
    let retrieval_bytes = total_items * output_polys * sub_bytes;

    SimReport {
        makespan_cycles,
        per_dpu_cycles: per_dpu,
        compute_seconds: makespan_cycles as f64 / model.clock_hz as f64,
        transfer_seconds: transfer_bytes as f64 / platform.host_link_bytes_per_second,
        retrieval_seconds: retrieval_bytes as f64 / platform.host_link_bytes_per_second,
        phase_breakdown: phase_max,
        strategy: plan.strategy,
        imbalanced: plan.imbalanced,
        rounds: plan.rounds,
        preset: cost.preset,
        butterfly_overhead: cost.butterfly_overhead,
    }
}
