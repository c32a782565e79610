//! Multidimensional retiming techniques.
//!
//! All four techniques share one mechanism: pick a strictly positive
//! schedule vector `s`, take a retiming direction `r` orthogonal to it, and
//! retime every node `u` by an integer multiple `m(u) * r`. They differ in
//! how the multiples are chosen:
//!
//! - incremental: one round per pass over the nodes whose incoming edges
//!   are all nonzero, until no zero-delay edge is left;
//! - chained: `K - label(u)` where `label` is the position along the
//!   zero-delay chain and `K` the longest chain;
//! - SPINE: chained multiples under SPINE's preferred schedule vector;
//! - optimal: the labels of the labeled graph, which groups zero-delay
//!   nodes whose total time fits in one minimal cycle period.

mod chained;
mod incremental;
mod optimal;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use chained::{build_multichain, chained_mdr, chained_mdr_with, spine_full, ChainMode};
pub use incremental::incremental_mdr;
pub use optimal::{build_lmdfg, optimal_mdr};

use crate::error::{Error, Result};
use crate::mdfg::{DelayVector, Mdfg};
use crate::retiming::{apply_retiming, Retiming};
use crate::schedule::ScheduleVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Technique {
    Incremental,
    Chained,
    Spine,
    Optimal,
}

impl Technique {
    pub const ALL: [Technique; 4] = [
        Technique::Incremental,
        Technique::Chained,
        Technique::Spine,
        Technique::Optimal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Technique::Incremental => "incremental",
            Technique::Chained => "chained",
            Technique::Spine => "spine",
            Technique::Optimal => "optimal",
        }
    }

    pub fn run(self, g: &Mdfg) -> Result<TechniqueResult> {
        match self {
            Technique::Incremental => incremental_mdr(g),
            Technique::Chained => chained_mdr(g),
            Technique::Spine => spine_full(g),
            Technique::Optimal => optimal_mdr(g),
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Technique {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Technique::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown technique `{s}` (expected incremental, chained, spine or optimal)"))
    }
}

/// Graph with integer node labels: the multi-chain graph of the chained
/// technique or the labeled graph of the optimal one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    pub base: Mdfg,
    pub labels: BTreeMap<String, u64>,
    pub max_label: u64,
}

impl LabeledGraph {
    fn new(base: Mdfg, labels: BTreeMap<String, u64>) -> Self {
        let max_label = labels.values().copied().max().unwrap_or(0);
        LabeledGraph {
            base,
            labels,
            max_label,
        }
    }

    pub fn label(&self, node: &str) -> Option<u64> {
        self.labels.get(node).copied()
    }

    /// Ids carrying `label`, sorted.
    pub fn nodes_with(&self, label: u64) -> Vec<&str> {
        self.labels
            .iter()
            .filter(|(_, &l)| l == label)
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TechniqueResult {
    pub technique: Technique,
    pub retimed: Mdfg,
    pub retiming: Retiming,
    pub schedule: ScheduleVector,
    pub base_r: DelayVector,
    /// Multiple of `base_r` applied to each node, by id (all nodes listed).
    pub multiples: BTreeMap<String, i64>,
    pub function_count: u64,
}

impl TechniqueResult {
    pub fn max_multiple(&self) -> i64 {
        self.multiples.values().copied().max().unwrap_or(0)
    }
}

fn require_valid_2d(g: &Mdfg) -> Result<()> {
    if g.dimension() != 2 {
        return Err(Error::UnsupportedDimension(g.dimension()));
    }
    g.ensure_valid()
}

/// Retimes node `u` by `multiples[u] * r`.
fn retime_by_multiples(
    technique: Technique,
    g: &Mdfg,
    schedule: ScheduleVector,
    base_r: DelayVector,
    multiples: &[i64],
    function_count: u64,
) -> Result<TechniqueResult> {
    let mut retiming = Retiming::new(g.dimension());
    let mut by_id = BTreeMap::new();
    for (v, &m) in multiples.iter().enumerate() {
        let id = &g.node(v).id;
        retiming.set(id, &base_r * m);
        by_id.insert(id.clone(), m);
    }
    let retimed = apply_retiming(g, &retiming)?;
    Ok(TechniqueResult {
        technique,
        retimed,
        retiming,
        schedule,
        base_r,
        multiples: by_id,
        function_count,
    })
}

/// Number of distinct nonzero multiples in use.
fn distinct_nonzero(multiples: &[i64]) -> u64 {
    let mut m: Vec<i64> = multiples.iter().copied().filter(|&m| m != 0).collect();
    m.sort_unstable();
    m.dedup();
    m.len() as u64
}

/// Side-by-side MDR function counts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FunctionCountTable {
    pub rows: Vec<(Technique, u64)>,
}

impl FunctionCountTable {
    pub fn get(&self, t: Technique) -> Option<u64> {
        self.rows.iter().find(|(k, _)| *k == t).map(|(_, c)| *c)
    }
}

impl fmt::Display for FunctionCountTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows.is_empty() {
            return Ok(());
        }
        writeln!(f, "{:<12} {}", "technique", "function_count")?;
        for (t, c) in &self.rows {
            writeln!(f, "{:<12} {}", t.name(), c)?;
        }
        Ok(())
    }
}

pub fn function_count_report(results: &[TechniqueResult]) -> FunctionCountTable {
    FunctionCountTable {
        rows: results.iter().map(|r| (r.technique, r.function_count)).collect(),
    }
}
