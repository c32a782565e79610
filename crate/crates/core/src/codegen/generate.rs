use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::analysis::{zero_delay_topological_order, zero_successors};
use crate::cdg::{is_causal, IterationBounds};
use crate::error::{Error, Result};
use crate::mdfg::{DelayVector, Mdfg};
use crate::retiming::{apply_retiming, Retiming};
use crate::schedule::{spatial_constraint, spatial_violation, ScheduleVector};
use crate::statement::{ArrayRef, Statement};

use super::program::{ArrayAccess, Assign, GeneratedProgram, IndexBase, IndexExpr, Item, LoopNest};

/// Loop nest for `original` retimed by `retiming`, executed row-major.
pub fn generate_loop_code(
    original: &Mdfg,
    retiming: &Retiming,
    bounds: &IterationBounds,
) -> Result<GeneratedProgram> {
    let schedule = ScheduleVector::row_major(original.dimension().max(1));
    generate_loop_code_with_schedule(original, retiming, bounds, &schedule)
}

/// Loop nest for `original` retimed by `retiming`.
///
/// Retimed iteration `q` runs node `u` on the instance originally at
/// `q + r(u)`. Along every dimension the range of `q` splits into
/// stretches where the set of nodes with an instance in bounds is
/// constant: the stretch where every node is live becomes the loop and the
/// others are unrolled before it (prologue, anchored at the lower bound)
/// or after it (epilogue, anchored at the upper bound). Statements inside
/// one iteration follow the zero-delay order of the retimed graph.
pub fn generate_loop_code_with_schedule(
    original: &Mdfg,
    retiming: &Retiming,
    bounds: &IterationBounds,
    schedule: &ScheduleVector,
) -> Result<GeneratedProgram> {
    let dim = original.dimension();
    bounds.check_dim(dim)?;
    if schedule.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: schedule.dim(),
        });
    }
    original.ensure_valid()?;
    if let Some(err) = spatial_violation(retiming, &spatial_constraint(bounds)) {
        return Err(err);
    }
    let retimed = apply_retiming(original, retiming)?;
    check_schedule(&retimed, schedule)?;
    let order = statement_order(original, &retimed).ok_or_else(|| Error::IllegalRetiming {
        schedule: schedule.components().to_vec(),
        reason: "retimed graph has a zero-delay cycle".into(),
    })?;

    let mut nodes = Vec::with_capacity(order.len());
    for v in order {
        let node = original.node(v);
        let statement = node
            .statement
            .clone()
            .ok_or_else(|| Error::MissingStatement(node.id.clone()))?;
        nodes.push(Live {
            id: node.id.clone(),
            statement,
            r: retiming.get(&node.id),
        });
    }

    let gen = Generator { bounds, dim };
    let all: Vec<&Live> = nodes.iter().collect();
    let items = gen.level(0, &all, &mut Vec::new());
    Ok(GeneratedProgram {
        dimension: dim,
        bounds: bounds.clone(),
        schedule: schedule.clone(),
        items,
    })
}

fn check_schedule(retimed: &Mdfg, schedule: &ScheduleVector) -> Result<()> {
    let s = schedule.components();
    for e in retimed.edges() {
        if e.delay.dot(s) < 0 || !is_causal(&e.delay, s) {
            return Err(Error::IllegalRetiming {
                schedule: s.to_vec(),
                reason: format!(
                    "delay {} on edge {} -> {} runs against the schedule",
                    e.delay,
                    retimed.node(e.src).id,
                    retimed.node(e.dst).id
                ),
            });
        }
    }
    Ok(())
}

/// Zero-delay order of `retimed`, ties broken by the order of `original`.
fn statement_order(original: &Mdfg, retimed: &Mdfg) -> Option<Vec<usize>> {
    let n = original.node_count();
    let mut rank = vec![0usize; n];
    for (pos, v) in zero_delay_topological_order(original).ok()?.into_iter().enumerate() {
        rank[v] = pos;
    }
    let succs = zero_successors(retimed);
    let mut indegree = vec![0usize; n];
    for list in &succs {
        for &v in list {
            indegree[v] += 1;
        }
    }
    let mut ready: BinaryHeap<Reverse<(usize, usize)>> =
        (0..n).filter(|&v| indegree[v] == 0).map(|v| Reverse((rank[v], v))).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((_, v))) = ready.pop() {
        order.push(v);
        for &w in &succs[v] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.push(Reverse((rank[w], w)));
            }
        }
    }
    (order.len() == n).then_some(order)
}

struct Live {
    id: String,
    statement: Statement,
    r: DelayVector,
}

struct Generator<'a> {
    bounds: &'a IterationBounds,
    dim: usize,
}

impl Generator<'_> {
    fn level(&self, k: usize, active: &[&Live], q: &mut Vec<IndexExpr>) -> Vec<Item> {
        if k == self.dim {
            return active.iter().map(|n| Item::Assign(self.assign(n, q))).collect();
        }
        let lo = self.bounds.lower[k];
        let hi = self.bounds.upper[k];
        let rmin = active.iter().map(|n| n.r.components()[k]).min().unwrap_or(0);
        let rmax = active.iter().map(|n| n.r.components()[k]).max().unwrap_or(0);
        let (first, last) = (lo - rmax, hi - rmin);
        let (loop_lo, loop_hi) = (lo - rmin, hi - rmax);

        let mut items = Vec::new();
        let unrolled = |items: &mut Vec<Item>, value: i64, anchor: IndexExpr, q: &mut Vec<IndexExpr>| {
            let live: Vec<&Live> = active
                .iter()
                .copied()
                .filter(|n| {
                    let p = value + n.r.components()[k];
                    p >= lo && p <= hi
                })
                .collect();
            if live.is_empty() {
                return;
            }
            q.push(anchor);
            items.extend(self.level(k + 1, &live, q));
            q.pop();
        };

        if loop_lo > loop_hi {
            for value in first..=last {
                unrolled(&mut items, value, IndexExpr::new(IndexBase::Lower(k), value - lo), q);
            }
            return items;
        }
        for value in first..loop_lo {
            unrolled(&mut items, value, IndexExpr::new(IndexBase::Lower(k), value - lo), q);
        }
        q.push(IndexExpr::new(IndexBase::Loop(k), 0));
        let body = self.level(k + 1, active, q);
        q.pop();
        items.push(Item::Loop(LoopNest {
            level: k,
            lower: IndexExpr::new(IndexBase::Lower(k), -rmin),
            upper: IndexExpr::new(IndexBase::Upper(k), -rmax),
            body,
        }));
        for value in loop_hi + 1..=last {
            unrolled(&mut items, value, IndexExpr::new(IndexBase::Upper(k), value - hi), q);
        }
        items
    }

    fn assign(&self, n: &Live, q: &[IndexExpr]) -> Assign {
        let access = |a: &ArrayRef| ArrayAccess {
            array: a.array.clone(),
            index: q
                .iter()
                .zip(a.offset_in(self.dim))
                .zip(n.r.components())
                .map(|((ix, o), r)| ix.shifted(o + r))
                .collect(),
        };
        Assign {
            node: n.id.clone(),
            iteration: q.to_vec(),
            target: access(&n.statement.target),
            op: n.statement.op,
            operands: n.statement.operands.iter().map(access).collect(),
            constant: n.statement.constant,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codegen::program::PrintOptions;
    use crate::fixtures;

    fn wdf_rd() -> Retiming {
        let mut r = Retiming::new(2);
        r.set("D", DelayVector::from([0, 1]));
        r
    }

    #[test]
    fn zero_retiming_gives_the_naive_nest() {
        let g = fixtures::wdf();
        let p = generate_loop_code(&g, &Retiming::new(2), &IterationBounds::square(2, 5)).unwrap();
        let text = p.print(&PrintOptions::symbolic(2));
        assert_eq!(
            text,
            "for (i = 0; i <= m; i++) {\n\
             \x20 for (j = 0; j <= n; j++) {\n\
             \x20   D[i][j] = B[i-1][j+1] * C[i-1][j-1];\n\
             \x20   A[i][j] = D[i][j] * 5;\n\
             \x20   B[i][j] = A[i][j] + 1;\n\
             \x20   C[i][j] = A[i][j] + 2;\n\
             \x20 }\n\
             }\n"
        );
        assert_eq!(p.code_size(), 6);
    }

    #[test]
    fn wdf_shifted_d_has_prologue_and_epilogue() {
        let g = fixtures::wdf();
        let p = generate_loop_code(&g, &wdf_rd(), &IterationBounds::square(2, 5)).unwrap();
        let text = p.print(&PrintOptions::symbolic(2));
        assert_eq!(
            text,
            "for (i = 0; i <= m; i++) {\n\
             \x20 D[i][0] = B[i-1][1] * C[i-1][-1];\n\
             \x20 for (j = 0; j <= n-1; j++) {\n\
             \x20   D[i][j+1] = B[i-1][j+2] * C[i-1][j];\n\
             \x20   A[i][j] = D[i][j] * 5;\n\
             \x20   B[i][j] = A[i][j] + 1;\n\
             \x20   C[i][j] = A[i][j] + 2;\n\
             \x20 }\n\
             \x20 A[i][n] = D[i][n] * 5;\n\
             \x20 B[i][n] = A[i][n] + 1;\n\
             \x20 C[i][n] = A[i][n] + 2;\n\
             }\n"
        );
        assert_eq!(p.assign_count(), 8);
        assert_eq!(p.code_size(), 10);
    }

    #[test]
    fn two_step_retiming_copies() {
        let g = fixtures::wdf();
        let mut r = wdf_rd();
        r.set("D", DelayVector::from([0, 2]));
        r.set("A", DelayVector::from([0, 1]));
        let p = generate_loop_code(&g, &r, &IterationBounds::square(2, 5)).unwrap();
        let Item::Loop(outer) = &p.items[0] else { panic!() };
        let nodes: Vec<&str> = outer
            .body
            .iter()
            .map(|it| match it {
                Item::Assign(a) => a.node.as_str(),
                Item::Loop(_) => "loop",
            })
            .collect();
        assert_eq!(nodes, ["D", "D", "A", "loop", "A", "B", "C", "B", "C"]);
        let inner = outer.body.iter().find_map(|it| match it {
            Item::Loop(l) => Some(l),
            _ => None,
        });
        let inner = inner.unwrap();
        assert_eq!(inner.lower, IndexExpr::new(IndexBase::Lower(1), 0));
        assert_eq!(inner.upper, IndexExpr::new(IndexBase::Upper(1), -2));
    }

    #[test]
    fn outer_shift_unrolls_whole_rows() {
        let g = fixtures::chain3();
        let mut r = Retiming::new(2);
        r.set("M", DelayVector::from([1, 0]));
        let p = generate_loop_code(&g, &r, &IterationBounds::square(2, 3)).unwrap();
        // one prologue row for M, the loop, one epilogue row for A1, A2
        assert!(matches!(p.items.first(), Some(Item::Loop(l)) if l.level == 1));
        assert!(matches!(p.items.get(1), Some(Item::Loop(l)) if l.level == 0));
        assert!(matches!(p.items.last(), Some(Item::Loop(l)) if l.level == 1));
    }

    #[test]
    fn rejects_illegal_and_oversized_retimings() {
        let g = fixtures::wdf();
        let mut r = Retiming::new(2);
        r.set("A", DelayVector::from([0, 1]));
        assert!(matches!(
            generate_loop_code(&g, &r, &IterationBounds::square(2, 5)),
            Err(Error::IllegalRetiming { .. })
        ));
        let mut big = Retiming::new(2);
        big.set("D", DelayVector::from([0, 5]));
        assert!(matches!(
            generate_loop_code(&g, &big, &IterationBounds::square(2, 5)),
            Err(Error::SpatialInfeasible { .. })
        ));
    }

    #[test]
    fn missing_statement() {
        let mut g = Mdfg::new(2);
        g.add_node("X", 1);
        assert!(matches!(
            generate_loop_code(&g, &Retiming::new(2), &IterationBounds::square(2, 2)),
            Err(Error::MissingStatement(_))
        ));
    }
}
