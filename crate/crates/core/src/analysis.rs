//! Structural and timing analyses on an [`Mdfg`].

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::mdfg::{DelayVector, Mdfg};

/// Zero-delay successor lists, one per node, in edge order.
pub fn zero_successors(g: &Mdfg) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); g.node_count()];
    for e in g.edges().iter().filter(|e| e.delay.is_zero()) {
        out[e.src].push(e.dst);
    }
    out
}

/// Zero-delay predecessor lists, one per node, in edge order.
pub fn zero_predecessors(g: &Mdfg) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); g.node_count()];
    for e in g.edges().iter().filter(|e| e.delay.is_zero()) {
        out[e.dst].push(e.src);
    }
    out
}

/// Topological order of the zero-delay subgraph. Ready nodes are taken in
/// ascending id order, so the result is deterministic.
pub fn zero_delay_topological_order(g: &Mdfg) -> Result<Vec<usize>> {
    let n = g.node_count();
    let succ = zero_successors(g);
    let mut indeg = vec![0usize; n];
    for s in &succ {
        for &v in s {
            indeg[v] += 1;
        }
    }
    let mut ready: BinaryHeap<Reverse<(&str, usize)>> = (0..n)
        .filter(|&v| indeg[v] == 0)
        .map(|v| Reverse((g.node(v).id.as_str(), v)))
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((_, u))) = ready.pop() {
        order.push(u);
        for &v in &succ[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                ready.push(Reverse((g.node(v).id.as_str(), v)));
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n)
            .filter(|&v| indeg[v] > 0)
            .min_by(|&a, &b| g.node(a).id.cmp(&g.node(b).id))
            .unwrap();
        return Err(Error::ZeroDelayCycle(g.node(stuck).id.clone()));
    }
    Ok(order)
}

/// Sum of delays along a walk given as edge indices.
pub fn path_delay(g: &Mdfg, path: &[usize]) -> Result<DelayVector> {
    let mut acc = g.zero();
    let mut at: Option<usize> = None;
    for (k, &ei) in path.iter().enumerate() {
        let e = g.edges().get(ei).ok_or(Error::UnknownEdge(ei))?;
        if let Some(prev) = at {
            if prev != e.src {
                return Err(Error::DisconnectedPath { index: k });
            }
        }
        acc = &acc + &e.delay;
        at = Some(e.dst);
    }
    Ok(acc)
}

/// Sum of node times along a path, endpoints included.
pub fn path_time(g: &Mdfg, path: &[&str]) -> Result<u64> {
    path.iter()
        .map(|id| g.require(id).map(|v| g.node(v).time))
        .sum()
}

/// Longest node-weighted path in the zero-delay subgraph.
///
/// A graph without zero-delay edges yields its largest node time.
pub fn cycle_period(g: &Mdfg) -> Result<u64> {
    let order = zero_delay_topological_order(g)?;
    let preds = zero_predecessors(g);
    let mut finish = vec![0u64; g.node_count()];
    for &v in &order {
        let start = preds[v].iter().map(|&u| finish[u]).max().unwrap_or(0);
        finish[v] = start + g.node(v).time;
    }
    Ok(finish.into_iter().max().unwrap_or(0))
}

/// Minimal achievable cycle period: the largest node time.
pub fn c_min(g: &Mdfg) -> Result<u64> {
    g.nodes().iter().map(|n| n.time).max().ok_or(Error::EmptyGraph)
}

/// Same nodes, only the zero-delay edges.
pub fn zero_delay_subgraph(g: &Mdfg) -> Mdfg {
    g.filter_edges(|e| e.delay.is_zero())
}

/// Maximal zero-delay paths (source to sink of the zero-delay subgraph), as
/// node index lists. Isolated nodes are omitted. At most `limit` paths.
pub fn zero_delay_paths(g: &Mdfg, limit: usize) -> Vec<Vec<usize>> {
    let succ = zero_successors(g);
    let preds = zero_predecessors(g);
    let mut out = Vec::new();
    let mut starts: Vec<usize> = (0..g.node_count())
        .filter(|&v| preds[v].is_empty() && !succ[v].is_empty())
        .collect();
    starts.sort_by(|&a, &b| g.node(a).id.cmp(&g.node(b).id));
    fn walk(v: usize, succ: &[Vec<usize>], path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        path.push(v);
        if succ[v].is_empty() {
            out.push(path.clone());
        } else {
            for &w in &succ[v] {
                walk(w, succ, path, out, limit);
            }
        }
        path.pop();
    }
    for s in starts {
        walk(s, &succ, &mut Vec::new(), &mut out, limit);
    }
    out
}

/// Simple cycles as edge-index lists, each reported once starting from its
/// smallest node index. Enumeration stops after `limit` cycles.
pub fn simple_cycles(g: &Mdfg, limit: usize) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut out_edges = vec![Vec::new(); n];
    for (i, e) in g.edges().iter().enumerate() {
        out_edges[e.src].push(i);
    }
    let mut cycles = Vec::new();
    let mut on_path = vec![false; n];
    let mut path = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        g: &Mdfg,
        start: usize,
        v: usize,
        out_edges: &[Vec<usize>],
        on_path: &mut [bool],
        path: &mut Vec<usize>,
        cycles: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        for &ei in &out_edges[v] {
            if cycles.len() >= limit {
                return;
            }
            let w = g.edges()[ei].dst;
            if w == start {
                path.push(ei);
                cycles.push(path.clone());
                path.pop();
            } else if w > start && !on_path[w] {
                on_path[w] = true;
                path.push(ei);
                dfs(g, start, w, out_edges, on_path, path, cycles, limit);
                path.pop();
                on_path[w] = false;
            }
        }
    }

    for s in 0..n {
        on_path[s] = true;
        dfs(g, s, s, &out_edges, &mut on_path, &mut path, &mut cycles, limit);
        on_path[s] = false;
        if cycles.len() >= limit {
            break;
        }
    }
    cycles
}
