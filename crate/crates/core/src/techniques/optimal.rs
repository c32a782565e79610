use std::collections::{BTreeMap, VecDeque};

use crate::analysis::{c_min, zero_delay_topological_order, zero_predecessors, zero_successors};
use crate::error::Result;
use crate::mdfg::Mdfg;
use crate::schedule::{find_schedule_vector, orthogonal_retiming};

use super::{require_valid_2d, retime_by_multiples, LabeledGraph, Technique, TechniqueResult};

/// Builds the labeled graph driving optimal retiming.
///
/// The zero-delay subgraph is swept against the edge direction, one level
/// per round. Level 0 starts from the sinks. A predecessor `p` joins the
/// level of its successors when all of them sit on that level and
/// `t(p) + max(acc(successors)) <= c_min`, where `acc` is the longest
/// execution time from a node to the end of its level group. Otherwise `p`
/// closes a group and opens the next level with `acc(p) = t(p)`. A node is
/// decided only once every zero-delay successor has been, on the round of
/// its highest successor, so levels never decrease along a zero-delay edge
/// and equal levels only occur inside a group that fits in `c_min`.
///
/// Nodes on level 0 carry no label; `max_label` is the highest level.
pub fn build_lmdfg(g: &Mdfg) -> Result<LabeledGraph> {
    zero_delay_topological_order(g)?;
    let cmin = if g.node_count() == 0 { 0 } else { c_min(g)? };
    let n = g.node_count();
    let mut preds = zero_predecessors(g);
    let mut succs = zero_successors(g);
    for list in preds.iter_mut().chain(succs.iter_mut()) {
        list.sort_by(|&a, &b| g.node(a).id.cmp(&g.node(b).id));
        list.dedup();
    }

    let mut level: Vec<Option<u64>> = vec![None; n];
    let mut acc = vec![0u64; n];
    let mut frontier: Vec<usize> = g
        .sorted_node_indices()
        .into_iter()
        .filter(|&v| succs[v].is_empty())
        .collect();
    for &v in &frontier {
        level[v] = Some(0);
        acc[v] = g.node(v).time;
    }

    let mut current = 0u64;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        let mut work: VecDeque<usize> = frontier.into_iter().collect();
        while let Some(x) = work.pop_front() {
            for &p in &preds[x] {
                if level[p].is_some() {
                    continue;
                }
                let succ_levels: Option<Vec<u64>> = succs[p].iter().map(|&s| level[s]).collect();
                let Some(succ_levels) = succ_levels else { continue };
                let highest = succ_levels.iter().copied().max().unwrap_or(0);
                if highest != current {
                    continue;
                }
                let longest = succs[p].iter().map(|&s| acc[s]).max().unwrap_or(0);
                let t = g.node(p).time;
                if succ_levels.iter().all(|&l| l == current) && t + longest <= cmin {
                    level[p] = Some(current);
                    acc[p] = t + longest;
                    work.push_back(p);
                } else {
                    level[p] = Some(current + 1);
                    acc[p] = t;
                    next.push(p);
                }
            }
        }
        frontier = next;
        current += 1;
    }

    let labels: BTreeMap<String, u64> = (0..n)
        .filter_map(|v| {
            let l = level[v].expect("every node is reached from a sink");
            (l > 0).then(|| (g.node(v).id.clone(), l))
        })
        .collect();
    Ok(LabeledGraph::new(g.clone(), labels))
}

/// Optimal multidimensional retiming: node labeled `i` is retimed by `i * r`.
pub fn optimal_mdr(g: &Mdfg) -> Result<TechniqueResult> {
    require_valid_2d(g)?;
    let schedule = find_schedule_vector(g)?;
    let r = orthogonal_retiming(&schedule, g)?;
    let lg = build_lmdfg(g)?;
    let multiples: Vec<i64> = g
        .nodes()
        .iter()
        .map(|n| lg.label(&n.id).unwrap_or(0) as i64)
        .collect();
    retime_by_multiples(Technique::Optimal, g, schedule, r, &multiples, lg.max_label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::cycle_period;
    use crate::fixtures;
    use crate::mdfg::DelayVector;

    #[test]
    fn wdf_unit_times() {
        let lg = build_lmdfg(&fixtures::wdf()).unwrap();
        assert_eq!(lg.label("A"), Some(1));
        assert_eq!(lg.label("D"), Some(2));
        assert_eq!(lg.label("B"), None);
        assert_eq!(lg.label("C"), None);
        assert_eq!(lg.max_label, 2);

        let res = optimal_mdr(&fixtures::wdf()).unwrap();
        assert_eq!(res.retiming.get("D"), DelayVector::from([0, 2]));
        assert_eq!(res.retiming.get("A"), DelayVector::from([0, 1]));
        assert_eq!(res.function_count, 2);
    }

    #[test]
    fn chain3_merges_the_adders() {
        let g = fixtures::chain3();
        let lg = build_lmdfg(&g).unwrap();
        assert_eq!(lg.labels, BTreeMap::from([("M".to_string(), 1)]));
        assert_eq!(lg.max_label, 1);
        let res = optimal_mdr(&g).unwrap();
        assert_eq!(res.function_count, 1);
        assert_eq!(cycle_period(&res.retimed).unwrap(), 3);
    }

    #[test]
    fn fully_parallel_input() {
        let mut g = Mdfg::new(2);
        g.add_node("X", 2);
        g.add_node("Y", 1);
        g.add_edge("X", "Y", [1, 0]).unwrap();
        let res = optimal_mdr(&g).unwrap();
        assert_eq!(res.function_count, 0);
        assert!(res.retiming.is_zero());
    }

    #[test]
    fn fan_out_waits_for_the_highest_successor() {
        // p feeds both a sink q and a node x that is pushed to level 1, so
        // p must land above level 1.
        let mut g = Mdfg::new(2);
        g.add_node("p", 1);
        g.add_node("q", 1);
        g.add_node("x", 1);
        g.add_node("y", 1);
        g.add_edge("p", "q", [0, 0]).unwrap();
        g.add_edge("p", "x", [0, 0]).unwrap();
        g.add_edge("x", "y", [0, 0]).unwrap();
        g.add_edge("q", "p", [1, 0]).unwrap();
        let lg = build_lmdfg(&g).unwrap();
        assert_eq!(lg.label("x"), Some(1));
        assert_eq!(lg.label("p"), Some(2));
        let res = optimal_mdr(&g).unwrap();
        assert_eq!(cycle_period(&res.retimed).unwrap(), 1);
    }

    #[test]
    fn mixed_times_keep_cycle_period_at_c_min() {
        let g = fixtures::wdf_with_times(2, 2, 1, 1);
        let res = optimal_mdr(&g).unwrap();
        assert_eq!(cycle_period(&res.retimed).unwrap(), 2);
        // A (2) cannot absorb B or C; D cannot join A.
        assert_eq!(res.function_count, 2);
    }
}
