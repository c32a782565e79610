//! Built-in example graphs.
//!
//! `wdf` is the two-dimensional wave digital filter loop
//!
//! ```text
//! for i in 0..=m { for j in 0..=n {
//!     D(i,j) = B(i-1,j+1) * C(i-1,j-1)
//!     A(i,j) = D(i,j) * 5
//!     B(i,j) = A(i,j) + 1
//!     C(i,j) = A(i,j) + 2
//! } }
//! ```
//!
//! Its back-edge delays B->D = (1,-1) and C->D = (1,1) follow from the
//! index arithmetic of the loop body.

use crate::mdfg::Mdfg;
use crate::statement::{ArrayRef, Op, Statement};

fn r(array: &str, offset: [i64; 2]) -> ArrayRef {
    ArrayRef::new(array, offset.to_vec())
}

/// Wave digital filter with the given node times (D, A, B, C).
pub fn wdf_with_times(td: u64, ta: u64, tb: u64, tc: u64) -> Mdfg {
    let mut g = Mdfg::new(2);
    g.add_node_with_statement(
        "D",
        td,
        Statement::new(r("D", [0, 0]), Op::Mul, vec![r("B", [-1, 1]), r("C", [-1, -1])], 0),
    );
    g.add_node_with_statement(
        "A",
        ta,
        Statement::new(r("A", [0, 0]), Op::ConstMul, vec![r("D", [0, 0])], 5),
    );
    g.add_node_with_statement(
        "B",
        tb,
        Statement::new(r("B", [0, 0]), Op::ConstAdd, vec![r("A", [0, 0])], 1),
    );
    g.add_node_with_statement(
        "C",
        tc,
        Statement::new(r("C", [0, 0]), Op::ConstAdd, vec![r("A", [0, 0])], 2),
    );
    g.add_edge("D", "A", [0, 0]).unwrap();
    g.add_edge("A", "B", [0, 0]).unwrap();
    g.add_edge("A", "C", [0, 0]).unwrap();
    g.add_edge("B", "D", [1, -1]).unwrap();
    g.add_edge("C", "D", [1, 1]).unwrap();
    g
}

/// Wave digital filter with unit node times.
pub fn wdf() -> Mdfg {
    wdf_with_times(1, 1, 1, 1)
}

/// Zero-delay chain M(3) -> A1(1) -> A2(1) closed by a (1,0) back edge.
pub fn chain3() -> Mdfg {
    let mut g = Mdfg::new(2);
    g.add_node_with_statement(
        "M",
        3,
        Statement::new(r("M", [0, 0]), Op::ConstMul, vec![r("A2", [-1, 0])], 3),
    );
    g.add_node_with_statement(
        "A1",
        1,
        Statement::new(r("A1", [0, 0]), Op::ConstAdd, vec![r("M", [0, 0])], 1),
    );
    g.add_node_with_statement(
        "A2",
        1,
        Statement::new(r("A2", [0, 0]), Op::ConstAdd, vec![r("A1", [0, 0])], 2),
    );
    g.add_edge("M", "A1", [0, 0]).unwrap();
    g.add_edge("A1", "A2", [0, 0]).unwrap();
    g.add_edge("A2", "M", [1, 0]).unwrap();
    g
}

/// Zero-delay chain of `len` unit-time nodes `N0 -> N1 -> ...` with a
/// (1,0) back edge from the last node to the first.
pub fn unit_chain(len: usize) -> Mdfg {
    assert!(len >= 1);
    let mut g = Mdfg::new(2);
    for k in 0..len {
        let id = format!("N{k}");
        let st = if k == 0 {
            Statement::new(
                r(&id, [0, 0]),
                Op::ConstAdd,
                vec![r(&format!("N{}", len - 1), [-1, 0])],
                1,
            )
        } else {
            Statement::new(r(&id, [0, 0]), Op::ConstMul, vec![r(&format!("N{}", k - 1), [0, 0])], 2)
        };
        g.add_node_with_statement(id, 1, st);
    }
    for k in 1..len {
        g.add_edge(&format!("N{}", k - 1), &format!("N{k}"), [0, 0]).unwrap();
    }
    g.add_edge(&format!("N{}", len - 1), "N0", [1, 0]).unwrap();
    g
}
