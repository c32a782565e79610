use crate::analysis::zero_predecessors;
use crate::error::{Error, Result};
use crate::mdfg::Mdfg;
use crate::retiming::{apply_retiming, Retiming};
use crate::schedule::{find_schedule_vector, orthogonal_retiming, strictly_positive};

use super::{require_valid_2d, retime_by_multiples, Technique, TechniqueResult};

/// Incremental multidimensional retiming.
///
/// Each round retimes by `r` the nodes whose incoming edges are all nonzero
/// and that still drive a zero-delay edge, together with their zero-delay
/// ancestors in the input graph. Taking the ancestors along keeps the
/// edges already opened in earlier rounds from collapsing back to zero; the
/// set still has only nonzero edges entering it, so each round is legal.
///
/// `s` is chosen once from the input graph. Every retiming along `r` leaves
/// `s . d(e)` unchanged, so the same `s` stays strictly positive on the
/// edges that were nonzero originally and the search would return it again
/// on every round.
pub fn incremental_mdr(g: &Mdfg) -> Result<TechniqueResult> {
    require_valid_2d(g)?;
    let schedule = find_schedule_vector(g)?;
    let r = orthogonal_retiming(&schedule, g)?;
    let n = g.node_count();
    let orig_preds = zero_predecessors(g);

    let mut multiples = vec![0i64; n];
    let mut current = g.clone();
    let mut rounds = 0usize;
    while current.has_zero_delay_edge() {
        if rounds > n {
            return Err(Error::NotConverged(rounds));
        }
        let mut all_in_nonzero = vec![true; n];
        let mut has_zero_out = vec![false; n];
        for e in current.edges() {
            if e.delay.is_zero() {
                all_in_nonzero[e.dst] = false;
                has_zero_out[e.src] = true;
            }
        }
        let mut selected: Vec<bool> = (0..n).map(|v| all_in_nonzero[v] && has_zero_out[v]).collect();
        let mut stack: Vec<usize> = (0..n).filter(|&v| selected[v]).collect();
        while let Some(v) = stack.pop() {
            for &u in &orig_preds[v] {
                if !selected[u] {
                    selected[u] = true;
                    stack.push(u);
                }
            }
        }
        for v in (0..n).filter(|&v| selected[v]) {
            multiples[v] += 1;
        }
        let mut retiming = Retiming::new(2);
        for (v, &m) in multiples.iter().enumerate() {
            retiming.set(&g.node(v).id, &r * m);
        }
        current = apply_retiming(g, &retiming)?;
        rounds += 1;
        debug_assert!(current.edges().iter().all(|e| e.delay.dot(schedule.components()) >= 0));
    }
    debug_assert!(strictly_positive(&schedule, g));
    retime_by_multiples(Technique::Incremental, g, schedule, r, &multiples, rounds as u64)
}
