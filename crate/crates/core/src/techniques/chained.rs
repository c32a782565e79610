use std::collections::BTreeMap;

use crate::analysis::{zero_delay_topological_order, zero_predecessors, zero_successors};
use crate::error::{Error, Result};
use crate::mdfg::Mdfg;
use crate::schedule::{find_schedule_vector, orthogonal_retiming, spine_schedule_choice, ScheduleVector};

use super::{distinct_nonzero, require_valid_2d, retime_by_multiples, LabeledGraph, Technique, TechniqueResult};

/// How to treat fan-in and fan-out in the zero-delay subgraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChainMode {
    /// Reject anything that is not a set of vertex-disjoint chains.
    Strict,
    /// Label each node by the node count of the longest zero-delay path
    /// ending at it; identical to `Strict` on true chains.
    #[default]
    BranchTolerant,
}

/// Labels every node by its position along its zero-delay chain (first
/// node 1, isolated nodes 1); `max_label` is the longest chain length.
pub fn build_multichain(g: &Mdfg, mode: ChainMode) -> Result<LabeledGraph> {
    let order = zero_delay_topological_order(g)?;
    let mut preds = zero_predecessors(g);
    let mut succs = zero_successors(g);
    for list in preds.iter_mut().chain(succs.iter_mut()) {
        list.sort_unstable();
        list.dedup();
    }
    if mode == ChainMode::Strict {
        if let Some(v) = g
            .sorted_node_indices()
            .into_iter()
            .find(|&v| preds[v].len() > 1 || succs[v].len() > 1)
        {
            return Err(Error::NotMultiChain(g.node(v).id.clone()));
        }
    }
    let mut label = vec![0u64; g.node_count()];
    for &v in &order {
        label[v] = 1 + preds[v].iter().map(|&u| label[u]).max().unwrap_or(0);
    }
    let labels: BTreeMap<String, u64> = label
        .iter()
        .enumerate()
        .map(|(v, &l)| (g.node(v).id.clone(), l))
        .collect();
    Ok(LabeledGraph::new(g.clone(), labels))
}

/// Chained multidimensional retiming with branch-tolerant labeling.
pub fn chained_mdr(g: &Mdfg) -> Result<TechniqueResult> {
    chained_mdr_with(g, ChainMode::default())
}

pub fn chained_mdr_with(g: &Mdfg, mode: ChainMode) -> Result<TechniqueResult> {
    require_valid_2d(g)?;
    let schedule = find_schedule_vector(g)?;
    chained_under(Technique::Chained, g, schedule, mode)
}

/// SPINE: chained retiming under SPINE's schedule preference.
pub fn spine_full(g: &Mdfg) -> Result<TechniqueResult> {
    require_valid_2d(g)?;
    let schedule = spine_schedule_choice(g)?;
    chained_under(Technique::Spine, g, schedule, ChainMode::default())
}

fn chained_under(
    technique: Technique,
    g: &Mdfg,
    schedule: ScheduleVector,
    mode: ChainMode,
) -> Result<TechniqueResult> {
    let r = orthogonal_retiming(&schedule, g)?;
    let chains = build_multichain(g, mode)?;
    let k = chains.max_label as i64;
    let multiples: Vec<i64> = if g.has_zero_delay_edge() {
        g.nodes()
            .iter()
            .map(|n| k - chains.label(&n.id).unwrap_or(1) as i64)
            .collect()
    } else {
        vec![0; g.node_count()]
    };
    let count = distinct_nonzero(&multiples);
    retime_by_multiples(technique, g, schedule, r, &multiples, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mdfg::DelayVector;

    #[test]
    fn single_chain_labels() {
        let lg = build_multichain(&fixtures::unit_chain(4), ChainMode::Strict).unwrap();
        assert_eq!(
            ["N0", "N1", "N2", "N3"].map(|n| lg.label(n).unwrap()),
            [1, 2, 3, 4]
        );
        assert_eq!(lg.max_label, 4);
    }

    #[test]
    fn isolated_nodes_are_labeled_one() {
        let mut g = Mdfg::new(2);
        for id in ["X", "Y", "Z"] {
            g.add_node(id, 1);
        }
        g.add_edge("X", "Y", [1, 0]).unwrap();
        let lg = build_multichain(&g, ChainMode::Strict).unwrap();
        assert!(lg.labels.values().all(|&l| l == 1));
        assert_eq!(lg.max_label, 1);
    }

    #[test]
    fn two_chains() {
        let mut g = Mdfg::new(2);
        for id in ["a1", "a2", "b1", "b2", "b3"] {
            g.add_node(id, 1);
        }
        g.add_edge("a1", "a2", [0, 0]).unwrap();
        g.add_edge("b1", "b2", [0, 0]).unwrap();
        g.add_edge("b2", "b3", [0, 0]).unwrap();
        let lg = build_multichain(&g, ChainMode::Strict).unwrap();
        assert_eq!(lg.label("a2"), Some(2));
        assert_eq!(lg.label("b3"), Some(3));
        assert_eq!(lg.max_label, 3);
    }

    #[test]
    fn wdf_branches() {
        let g = fixtures::wdf();
        assert_eq!(
            build_multichain(&g, ChainMode::Strict),
            Err(Error::NotMultiChain("A".into()))
        );
        let lg = build_multichain(&g, ChainMode::BranchTolerant).unwrap();
        assert_eq!(["D", "A", "B", "C"].map(|n| lg.label(n).unwrap()), [1, 2, 3, 3]);
        let res = chained_mdr(&g).unwrap();
        assert_eq!(res.retiming.get("D"), DelayVector::from([0, 2]));
        assert_eq!(res.retiming.get("A"), DelayVector::from([0, 1]));
        assert_eq!(res.function_count, 2);
        assert!(!res.retimed.has_zero_delay_edge());
        assert!(chained_mdr_with(&g, ChainMode::Strict).is_err());
    }

    #[test]
    fn two_node_chain() {
        let mut g = Mdfg::new(2);
        g.add_node("u", 1);
        g.add_node("v", 1);
        g.add_edge("u", "v", [0, 0]).unwrap();
        g.add_edge("v", "u", [1, 0]).unwrap();
        let res = chained_mdr(&g).unwrap();
        assert_eq!(res.retiming.get("u"), DelayVector::from([0, 1]));
        assert_eq!(res.function_count, 1);
    }

    #[test]
    fn spine_examples() {
        let res = spine_full(&fixtures::wdf()).unwrap();
        assert_eq!(res.schedule.components(), &[1, 0]);
        assert_eq!(res.base_r, DelayVector::from([0, 1]));
        assert_eq!(res.retimed, chained_mdr(&fixtures::wdf()).unwrap().retimed);

        let mut g = Mdfg::new(2);
        g.add_node("u", 1);
        g.add_node("v", 1);
        g.add_edge("u", "v", [0, 0]).unwrap();
        g.add_edge("v", "u", [0, 2]).unwrap();
        let res = spine_full(&g).unwrap();
        assert_eq!(res.schedule.components(), &[0, 1]);
        assert_eq!(res.base_r, DelayVector::from([1, 0]));
        assert!(!res.retimed.has_zero_delay_edge());

        let mut edgeless = Mdfg::new(2);
        edgeless.add_node("x", 1);
        let res = spine_full(&edgeless).unwrap();
        assert!(res.retiming.is_zero());
        assert_eq!(res.function_count, 0);
    }
}
