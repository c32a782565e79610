//! Iteration spaces, cell dependency graphs and realizability.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdfg::{DelayVector, Mdfg};
use crate::schedule::ScheduleVector;

/// Largest iteration space that [`build_cdg`] will materialize.
pub const CELL_LIMIT: u128 = 1_000_000;

/// Inclusive per-dimension loop bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationBounds {
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
}

impl IterationBounds {
    pub fn new(lower: Vec<i64>, upper: Vec<i64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (dim, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if l > u {
                return Err(Error::InvalidBounds { dim, lower: l, upper: u });
            }
        }
        Ok(IterationBounds { lower, upper })
    }

    /// `0..=size-1` in every dimension.
    pub fn square(dim: usize, size: i64) -> Self {
        IterationBounds {
            lower: vec![0; dim],
            upper: vec![size - 1; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn extent(&self, k: usize) -> i64 {
        self.upper[k] - self.lower[k] + 1
    }

    pub fn cell_count(&self) -> u128 {
        (0..self.dim()).map(|k| self.extent(k) as u128).product()
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.iter()
            .enumerate()
            .all(|(k, &c)| c >= self.lower[k] && c <= self.upper[k])
    }

    /// All cells in row-major (lexicographic) order.
    pub fn cells(&self) -> CellIter<'_> {
        CellIter {
            bounds: self,
            next: Some(self.lower.clone()),
        }
    }

    fn linear_index(&self, p: &[i64]) -> usize {
        let mut idx = 0usize;
        for k in 0..self.dim() {
            idx = idx * self.extent(k) as usize + (p[k] - self.lower[k]) as usize;
        }
        idx
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

pub struct CellIter<'a> {
    bounds: &'a IterationBounds,
    next: Option<Vec<i64>>,
}

impl Iterator for CellIter<'_> {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut k = succ.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            if succ[k] < self.bounds.upper[k] {
                succ[k] += 1;
                self.next = Some(succ);
                break;
            }
            succ[k] = self.bounds.lower[k];
        }
        Some(cur)
    }
}

/// Whole-iteration cells and the arcs induced by nonzero edge delays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellDependencyGraph {
    pub cells: Vec<Vec<i64>>,
    /// Arcs as indices into `cells`, one per (edge, source cell) pair.
    pub arcs: Vec<(usize, usize)>,
}

impl CellDependencyGraph {
    pub fn is_acyclic(&self) -> bool {
        let n = self.cells.len();
        let mut indeg = vec![0usize; n];
        let mut succ = vec![Vec::new(); n];
        for &(a, b) in &self.arcs {
            succ[a].push(b);
            indeg[b] += 1;
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(u) = stack.pop() {
            seen += 1;
            for &v in &succ[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    stack.push(v);
                }
            }
        }
        seen == n
    }
}

pub fn build_cdg(g: &Mdfg, bounds: &IterationBounds) -> Result<CellDependencyGraph> {
    bounds.check_dim(g.dimension())?;
    let count = bounds.cell_count();
    if count > CELL_LIMIT {
        return Err(Error::CellLimit {
            cells: count,
            limit: CELL_LIMIT,
        });
    }
    let cells: Vec<Vec<i64>> = bounds.cells().collect();
    let mut arcs = Vec::new();
    for e in g.edges().iter().filter(|e| !e.delay.is_zero()) {
        for (i, p) in cells.iter().enumerate() {
            let q: Vec<i64> = p.iter().zip(e.delay.components()).map(|(a, b)| a + b).collect();
            if bounds.contains(&q) {
                arcs.push((i, bounds.linear_index(&q)));
            }
        }
    }
    Ok(CellDependencyGraph { cells, arcs })
}

/// Dimensions in tie-break order: descending `|s[k]|`, then ascending `k`.
pub fn tie_break_order(schedule: &[i64]) -> Vec<usize> {
    let mut dims: Vec<usize> = (0..schedule.len()).collect();
    dims.sort_by_key(|&k| (std::cmp::Reverse(schedule[k].abs()), k));
    dims
}

/// Whether a dependence at distance `d` runs forward in schedule-major
/// order: iterations sorted by `s . p`, ties broken lexicographically over
/// [`tie_break_order`]. The zero vector counts as forward (same iteration).
pub fn is_causal(d: &DelayVector, schedule: &[i64]) -> bool {
    let dot = d.dot(schedule);
    if dot != 0 {
        return dot > 0;
    }
    tie_break_order(schedule)
        .into_iter()
        .map(|k| d.components()[k])
        .find(|&c| c != 0)
        .is_none_or(|c| c > 0)
}

/// Sort key of iteration `p` in schedule-major order.
pub fn schedule_major_key(p: &[i64], schedule: &[i64]) -> (i64, Vec<i64>) {
    let dot = p.iter().zip(schedule).map(|(a, b)| a * b).sum();
    (dot, tie_break_order(schedule).into_iter().map(|k| p[k]).collect())
}

/// Realizability of `g` under `schedule` on `bounds`: every edge satisfies
/// `s . d(e) >= 0`, every nonzero delay is causal in schedule-major order,
/// and the cell dependency graph is acyclic. Spaces above [`CELL_LIMIT`]
/// are judged by the local rules alone.
pub fn is_realizable(g: &Mdfg, schedule: &ScheduleVector, bounds: &IterationBounds) -> bool {
    let s = schedule.components();
    if s.len() != g.dimension() {
        return false;
    }
    let local = g
        .edges()
        .iter()
        .all(|e| e.delay.dot(s) >= 0 && is_causal(&e.delay, s));
    if !local {
        return false;
    }
    match build_cdg(g, bounds) {
        Ok(cdg) => cdg.is_acyclic(),
        Err(_) => true,
    }
}
