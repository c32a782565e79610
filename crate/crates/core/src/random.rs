//! Random two-dimensional graphs for property tests.
//!
//! Zero-delay edges form vertex-disjoint chains. Nonzero delays are
//! lexicographically positive with components in `[-2, 2]`, so the row-major
//! loop nest is a valid schedule and some `(k, 1)` with `k >= 3` is strictly
//! positive. Every node writes its own array; a node reads the producer of
//! each incoming edge, and nodes without incoming edges read an input array
//! `X_<id>`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cdg::IterationBounds;
use crate::mdfg::{DelayVector, Mdfg};
use crate::retiming::Retiming;
use crate::schedule::{check_spatial_feasibility, spatial_constraint};
use crate::statement::{ArrayRef, Op, Statement};
use crate::techniques::Technique;

/// Random valid graph with `2..=max_nodes` nodes.
pub fn random_graph<R: Rng>(rng: &mut R, max_nodes: usize) -> Mdfg {
    let n = rng.gen_range(2..=max_nodes.max(2));
    let ids: Vec<String> = (0..n).map(|k| format!("n{k}")).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: Vec<(usize, usize, [i64; 2])> = Vec::new();
    let mut start = 0;
    while start < n {
        let len = rng.gen_range(1..=n - start);
        for w in order[start..start + len].windows(2) {
            edges.push((w[0], w[1], [0, 0]));
        }
        start += len;
    }
    let extra = rng.gen_range(1..=n + 2);
    for _ in 0..extra {
        let src = rng.gen_range(0..n);
        let dst = rng.gen_range(0..n);
        edges.push((src, dst, random_positive_delay(rng)));
    }

    let mut operands: Vec<Vec<ArrayRef>> = vec![Vec::new(); n];
    for &(u, v, d) in &edges {
        operands[v].push(ArrayRef::new(ids[u].clone(), vec![-d[0], -d[1]]));
    }
    let mut g = Mdfg::new(2);
    for (v, id) in ids.iter().enumerate() {
        let mut ops = std::mem::take(&mut operands[v]);
        if ops.is_empty() {
            ops.push(ArrayRef::new(format!("X_{id}"), vec![0, 0]));
        }
        let (op, constant) = match ops.len() {
            1 => match rng.gen_range(0..3) {
                0 => (Op::ConstAdd, rng.gen_range(-9..=9)),
                1 => (Op::ConstMul, rng.gen_range(-3..=3)),
                _ => (Op::Copy, 0),
            },
            _ if rng.gen_bool(0.8) => (Op::Add, 0),
            _ => (Op::Mul, 0),
        };
        let st = Statement::new(ArrayRef::new(id.clone(), vec![0, 0]), op, ops, constant);
        g.add_node_with_statement(id.clone(), rng.gen_range(1..=3), st);
    }
    for (u, v, d) in edges {
        g.add_edge_idx(u, v, DelayVector::from(d));
    }
    debug_assert!(g.validate().is_empty(), "{:?}", g.validate());
    g
}

fn random_positive_delay<R: Rng>(rng: &mut R) -> [i64; 2] {
    let d0 = rng.gen_range(0..=2);
    let d1 = if d0 == 0 { rng.gen_range(1..=2) } else { rng.gen_range(-2..=2) };
    [d0, d1]
}

/// Random graph on which every technique succeeds with a retiming that
/// fits `bounds`.
pub fn random_feasible_graph<R: Rng>(rng: &mut R, max_nodes: usize, bounds: &IterationBounds) -> Mdfg {
    let sc = spatial_constraint(bounds);
    loop {
        let g = random_graph(rng, max_nodes);
        let ok = Technique::ALL.iter().all(|t| match t.run(&g) {
            Ok(res) => check_spatial_feasibility(&res.retiming, &sc),
            Err(_) => false,
        });
        if ok {
            return g;
        }
    }
}

/// Random retiming with components in `[-magnitude, magnitude]`.
pub fn random_retiming<R: Rng>(rng: &mut R, g: &Mdfg, magnitude: i64) -> Retiming {
    let mut r = Retiming::new(g.dimension());
    for node in g.nodes() {
        let v: Vec<i64> = (0..g.dimension())
            .map(|_| rng.gen_range(-magnitude..=magnitude))
            .collect();
        r.set(&node.id, DelayVector::new(v));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::find_schedule_vector;
    use crate::techniques::{build_multichain, ChainMode};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn graphs_are_valid_chains_with_schedules() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let g = random_graph(&mut rng, 8);
            assert!(g.node_count() <= 8);
            assert!(g.validate().is_empty());
            assert!(build_multichain(&g, ChainMode::Strict).is_ok());
            assert!(find_schedule_vector(&g).is_ok());
        }
    }

    #[test]
    fn feasible_graphs_fit() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b = IterationBounds::square(2, 8);
        for _ in 0..10 {
            let g = random_feasible_graph(&mut rng, 8, &b);
            for t in Technique::ALL {
                let res = t.run(&g).unwrap();
                assert!(check_spatial_feasibility(&res.retiming, &spatial_constraint(&b)));
            }
        }
    }
}
