//! Retiming functions and their legality.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::{path_delay, simple_cycles};
use crate::cdg::{is_causal, is_realizable, IterationBounds};
use crate::error::{Error, Result};
use crate::mdfg::{DelayVector, Mdfg};
use crate::schedule::ScheduleVector;

/// Most simple cycles compared by [`verify_retiming_legality`].
pub const CYCLE_SAMPLE_LIMIT: usize = 10_000;

/// Total map from node id to retiming vector; absent nodes map to zero.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Retiming {
    dim: usize,
    vectors: BTreeMap<String, DelayVector>,
}

impl Retiming {
    pub fn new(dim: usize) -> Self {
        Retiming {
            dim,
            vectors: BTreeMap::new(),
        }
    }

    pub fn from_map(dim: usize, map: BTreeMap<String, DelayVector>) -> Result<Self> {
        let mut r = Retiming::new(dim);
        for (k, v) in map {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.dim(),
                });
            }
            r.set(&k, v);
        }
        Ok(r)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, node: &str) -> DelayVector {
        self.vectors
            .get(node)
            .cloned()
            .unwrap_or_else(|| DelayVector::zero(self.dim))
    }

    pub fn set(&mut self, node: &str, r: DelayVector) {
        assert_eq!(r.dim(), self.dim, "retiming vector dimension");
        if r.is_zero() {
            self.vectors.remove(node);
        } else {
            self.vectors.insert(node.to_string(), r);
        }
    }

    /// Adds `r` to the node's current vector.
    pub fn accumulate(&mut self, node: &str, r: &DelayVector) {
        let cur = self.get(node);
        self.set(node, &cur + r);
    }

    /// Nonzero entries in id order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &DelayVector)> {
        self.vectors.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn is_zero(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Nonzero entries as a plain map.
    pub fn as_map(&self) -> &BTreeMap<String, DelayVector> {
        &self.vectors
    }
}

/// `d_r(e) = d(e) + r(src) - r(dst)` on every edge.
pub fn apply_retiming(g: &Mdfg, r: &Retiming) -> Result<Mdfg> {
    if r.dim() != g.dimension() {
        return Err(Error::DimensionMismatch {
            expected: g.dimension(),
            got: r.dim(),
        });
    }
    let delays = g
        .edges()
        .iter()
        .map(|e| {
            let ru = r.get(&g.node(e.src).id);
            let rv = r.get(&g.node(e.dst).id);
            &(&e.delay + &ru) - &rv
        })
        .collect();
    Ok(g.with_delays(delays))
}

/// Checks that retiming `original` by `r` is legal under `schedule`:
/// simple-cycle delays are conserved, every retimed edge has
/// `s . d_r(e) >= 0` and is causal, and the retimed graph is realizable
/// on `bounds`.
pub fn verify_retiming_legality(
    original: &Mdfg,
    r: &Retiming,
    schedule: &ScheduleVector,
    bounds: &IterationBounds,
) -> bool {
    let Ok(retimed) = apply_retiming(original, r) else {
        return false;
    };
    let s = schedule.components();
    for cycle in simple_cycles(original, CYCLE_SAMPLE_LIMIT) {
        match (path_delay(original, &cycle), path_delay(&retimed, &cycle)) {
            (Ok(a), Ok(b)) if a == b => {}
            _ => return false,
        }
    }
    let edges_ok = retimed
        .edges()
        .iter()
        .all(|e| e.delay.dot(s) >= 0 && is_causal(&e.delay, s));
    edges_ok && is_realizable(&retimed, schedule, bounds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn delays(g: &Mdfg) -> Vec<(String, DelayVector)> {
        g.edges()
            .iter()
            .map(|e| (format!("{}->{}", g.node(e.src).id, g.node(e.dst).id), e.delay.clone()))
            .collect()
    }

    fn rt(entries: &[(&str, [i64; 2])]) -> Retiming {
        let mut r = Retiming::new(2);
        for (n, v) in entries {
            r.set(n, (*v).into());
        }
        r
    }

    #[test]
    fn retime_d_by_0_1() {
        let g = apply_retiming(&fixtures::wdf(), &rt(&[("D", [0, 1])])).unwrap();
        let expect = [
            ("D->A", [0, 1]),
            ("A->B", [0, 0]),
            ("A->C", [0, 0]),
            ("B->D", [1, -2]),
            ("C->D", [1, 0]),
        ];
        for ((name, d), (en, ed)) in delays(&g).iter().zip(expect) {
            assert_eq!(name, en);
            assert_eq!(d, &DelayVector::from(ed));
        }
    }

    #[test]
    fn zero_retiming_is_identity() {
        let g = fixtures::wdf();
        assert_eq!(apply_retiming(&g, &Retiming::new(2)).unwrap(), g);
    }

    #[test]
    fn full_parallel_wdf_delays() {
        let g = apply_retiming(&fixtures::wdf(), &rt(&[("D", [0, 2]), ("A", [0, 1])])).unwrap();
        let got: Vec<_> = delays(&g).into_iter().map(|(_, d)| d).collect();
        let want: Vec<DelayVector> = [[0, 1], [0, 1], [0, 1], [1, -3], [1, -1]]
            .into_iter()
            .map(DelayVector::from)
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn legality_examples() {
        let g = fixtures::wdf();
        let s = ScheduleVector::row_major(2);
        let b = IterationBounds::square(2, 5);
        assert!(verify_retiming_legality(&g, &rt(&[("D", [0, 1])]), &s, &b));
        assert!(!verify_retiming_legality(&g, &rt(&[("A", [0, 1])]), &s, &b));
        assert!(verify_retiming_legality(&g, &Retiming::new(2), &s, &b));
    }

    #[test]
    fn zero_vectors_are_not_stored() {
        let mut r = Retiming::new(2);
        r.set("X", [0, 0].into());
        assert!(r.is_zero());
        r.accumulate("X", &[0, 1].into());
        r.accumulate("X", &[0, -1].into());
        assert!(r.is_zero());
        assert_eq!(r.get("X"), DelayVector::zero(2));
    }
}
