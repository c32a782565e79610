use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::analysis::{c_min, cycle_period, zero_delay_topological_order, zero_predecessors};
use crate::cdg::IterationBounds;
use crate::error::{Error, Result};
use crate::mdfg::{DelayVector, Mdfg};
use crate::retiming::{apply_retiming, Retiming};
use crate::techniques::TechniqueResult;

use super::program::GeneratedProgram;

/// Largest number of node instances [`cycle_count`] will walk.
pub const INSTANCE_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub cycle_period: u64,
    pub c_min: u64,
    pub function_count: u64,
    pub cycle_count: u64,
    pub execution_time: u64,
    pub code_size: u64,
}

impl MetricsReport {
    pub fn new(cycle_period: u64, c_min: u64, function_count: u64, cycle_count: u64, code_size: u64) -> Self {
        MetricsReport {
            cycle_period,
            c_min,
            function_count,
            cycle_count,
            execution_time: cycle_count * c_min,
            code_size,
        }
    }
}

pub fn execution_time(report: &MetricsReport) -> u64 {
    report.cycle_count * report.c_min
}

pub fn count_code_size(program: &GeneratedProgram) -> u64 {
    program.code_size()
}

/// Metrics of a technique run on `original`, with `program` generated
/// from its retiming.
pub fn measure(
    original: &Mdfg,
    result: &TechniqueResult,
    program: &GeneratedProgram,
    bounds: &IterationBounds,
) -> Result<MetricsReport> {
    Ok(MetricsReport::new(
        cycle_period(&result.retimed)?,
        c_min(original)?,
        result.function_count,
        cycle_count(original, &result.retiming, bounds)?,
        program.code_size(),
    ))
}

/// Cycles of length `c_min` needed to run every instance in `bounds`.
///
/// Retimed iterations run one after another. Inside an iteration the live
/// nodes are placed in zero-delay order: a node joins the cycle of its
/// latest live predecessor when the time accumulated in that cycle plus its
/// own still fits in `c_min`, and opens the next cycle otherwise.
pub fn cycle_count(original: &Mdfg, retiming: &Retiming, bounds: &IterationBounds) -> Result<u64> {
    let dim = original.dimension();
    bounds.check_dim(dim)?;
    let n = original.node_count();
    if n == 0 {
        return Ok(0);
    }
    let instances = bounds.cell_count() * n as u128;
    if instances > INSTANCE_LIMIT {
        return Err(Error::InstanceLimit {
            instances,
            limit: INSTANCE_LIMIT,
        });
    }
    let retimed = apply_retiming(original, retiming)?;
    let order = zero_delay_topological_order(&retimed)?;
    let preds = zero_predecessors(&retimed);
    let cmin = c_min(original)?;
    let shifts: Vec<DelayVector> = (0..n).map(|v| retiming.get(&original.node(v).id)).collect();

    let ranges: Vec<(i64, i64)> = (0..dim)
        .map(|k| {
            let rmin = shifts.iter().map(|r| r.components()[k]).min().unwrap_or(0);
            let rmax = shifts.iter().map(|r| r.components()[k]).max().unwrap_or(0);
            (bounds.lower[k] - rmax, bounds.upper[k] - rmin)
        })
        .collect();
    let q_bounds = IterationBounds::new(
        ranges.iter().map(|r| r.0).collect(),
        ranges.iter().map(|r| r.1).collect(),
    )?;

    let mut memo: HashMap<Vec<bool>, u64> = HashMap::new();
    let mut total = 0u64;
    let mut p = vec![0i64; dim];
    for q in q_bounds.cells() {
        let live: Vec<bool> = shifts
            .iter()
            .map(|r| {
                for k in 0..dim {
                    p[k] = q[k] + r.components()[k];
                }
                bounds.contains(&p)
            })
            .collect();
        if !live.contains(&true) {
            continue;
        }
        let cycles = *memo
            .entry(live)
            .or_insert_with_key(|live| pack(original, &order, &preds, live, cmin));
        total += cycles;
    }
    Ok(total)
}

fn pack(g: &Mdfg, order: &[usize], preds: &[Vec<usize>], live: &[bool], cmin: u64) -> u64 {
    // (cycle index, time used in that cycle when the node finishes)
    let mut slot: Vec<Option<(u64, u64)>> = vec![None; g.node_count()];
    let mut cycles = 0;
    for &v in order {
        if !live[v] {
            continue;
        }
        let t = g.node(v).time;
        let latest = preds[v].iter().filter_map(|&u| slot[u]).max();
        let placed = match latest {
            Some((c, used)) if used + t <= cmin => (c, used + t),
            Some((c, _)) => (c + 1, t),
            None => (0, t),
        };
        cycles = cycles.max(placed.0 + 1);
        slot[v] = Some(placed);
    }
    cycles
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub node: String,
    /// Cycle period, relative to the first one of the iteration.
    pub cycle: u64,
    /// Position in zero-delay order within the iteration.
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationSchedule {
    pub entries: Vec<ScheduleEntry>,
    pub periods: u64,
}

impl IterationSchedule {
    pub fn cycle_of(&self, node: &str) -> Option<u64> {
        self.entries.iter().find(|e| e.node == node).map(|e| e.cycle)
    }

    /// Node ids executing in cycle `c`, in execution order.
    pub fn in_cycle(&self, c: u64) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.cycle == c)
            .map(|e| e.node.as_str())
            .collect()
    }
}

/// Cycle period in which each node runs its instance of one original
/// iteration.
///
/// With no retiming everything runs in cycle 0. Otherwise every retiming
/// vector must be `m(u) * base_r`, and node `u` runs at `M - m(u)` where
/// `M` is the largest multiple.
pub fn iteration_schedule(
    original: &Mdfg,
    retiming: &Retiming,
    base_r: Option<&DelayVector>,
) -> Result<IterationSchedule> {
    let order = zero_delay_topological_order(original)?;
    let mut multiples = vec![0i64; original.node_count()];
    if !retiming.is_zero() {
        let base = base_r
            .filter(|b| !b.is_zero())
            .ok_or_else(|| {
                let first = retiming.iter().next().map(|(n, _)| n.to_string()).unwrap_or_default();
                Error::NoScheduleBasis(first)
            })?;
        for (v, node) in original.nodes().iter().enumerate() {
            multiples[v] = multiple_of(&retiming.get(&node.id), base)
                .ok_or_else(|| Error::NoScheduleBasis(node.id.clone()))?;
        }
    }
    let top = multiples.iter().copied().max().unwrap_or(0);
    let low = multiples.iter().copied().min().unwrap_or(0);
    let entries = order
        .iter()
        .enumerate()
        .map(|(pos, &v)| ScheduleEntry {
            node: original.node(v).id.clone(),
            cycle: (top - multiples[v]) as u64,
            order: pos,
        })
        .collect();
    let periods = if original.node_count() == 0 { 0 } else { (top - low + 1) as u64 };
    Ok(IterationSchedule { entries, periods })
}

fn multiple_of(r: &DelayVector, base: &DelayVector) -> Option<i64> {
    if r.dim() != base.dim() {
        return None;
    }
    let (k, &b) = base.components().iter().enumerate().find(|(_, &b)| b != 0)?;
    let c = r.components()[k];
    if c % b != 0 {
        return None;
    }
    let m = c / b;
    (&(base * m) == r).then_some(m)
}
