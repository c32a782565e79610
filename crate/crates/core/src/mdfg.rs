//! Multidimensional data flow graph model.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statement::Statement;

/// An n-dimensional integer vector. Component 0 is the outermost loop.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DelayVector(pub Vec<i64>);

impl DelayVector {
    pub fn zero(dim: usize) -> Self {
        DelayVector(vec![0; dim])
    }

    pub fn new(components: Vec<i64>) -> Self {
        DelayVector(components)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn dot(&self, other: &[i64]) -> i64 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for DelayVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for DelayVector {
    fn from(v: Vec<i64>) -> Self {
        DelayVector(v)
    }
}

impl<const N: usize> From<[i64; N]> for DelayVector {
    fn from(v: [i64; N]) -> Self {
        DelayVector(v.to_vec())
    }
}

impl Add for &DelayVector {
    type Output = DelayVector;
    fn add(self, rhs: &DelayVector) -> DelayVector {
        debug_assert_eq!(self.dim(), rhs.dim());
        DelayVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &DelayVector {
    type Output = DelayVector;
    fn sub(self, rhs: &DelayVector) -> DelayVector {
        debug_assert_eq!(self.dim(), rhs.dim());
        DelayVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<i64> for &DelayVector {
    type Output = DelayVector;
    fn mul(self, k: i64) -> DelayVector {
        DelayVector(self.0.iter().map(|a| a * k).collect())
    }
}

impl Neg for &DelayVector {
    type Output = DelayVector;
    fn neg(self) -> DelayVector {
        self * -1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub time: u64,
    pub statement: Option<Statement>,
}

/// Edge between two node indices. Identity is its position in the edge list,
/// so parallel edges with distinct delays are kept apart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub delay: DelayVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    Malformed,
    DimensionMismatch,
    DuplicateId,
    UnknownNode,
    NonPositiveTime,
    ZeroDelayCycle,
    StatementMismatch,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::Malformed => "malformed",
            ViolationKind::DimensionMismatch => "dimension mismatch",
            ViolationKind::DuplicateId => "duplicate id",
            ViolationKind::UnknownNode => "unknown node",
            ViolationKind::NonPositiveTime => "non-positive time",
            ViolationKind::ZeroDelayCycle => "zero-delay cycle",
            ViolationKind::StatementMismatch => "statement mismatch",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// JSON-path style location, e.g. `$.edges[2].delay`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.path, self.kind.as_str(), self.message)
    }
}

/// Node- and edge-weighted directed graph `G = (V, E, d, t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mdfg {
    dimension: usize,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
}

impl Mdfg {
    pub fn new(dimension: usize) -> Self {
        Mdfg {
            dimension,
            nodes: Vec::new(),
            edges: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, idx: usize) -> &Node {
        &self.nodes[idx]
    }

    /// Index of the first node with this id.
    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn add_node(&mut self, id: impl Into<String>, time: u64) -> usize {
        self.push_node(Node {
            id: id.into(),
            time,
            statement: None,
        })
    }

    pub fn add_node_with_statement(
        &mut self,
        id: impl Into<String>,
        time: u64,
        statement: Statement,
    ) -> usize {
        self.push_node(Node {
            id: id.into(),
            time,
            statement: Some(statement),
        })
    }

    pub fn push_node(&mut self, node: Node) -> usize {
        let idx = self.nodes.len();
        self.index.entry(node.id.clone()).or_insert(idx);
        self.nodes.push(node);
        idx
    }

    pub fn add_edge(&mut self, src: &str, dst: &str, delay: impl Into<DelayVector>) -> Result<usize> {
        let src = self.require(src)?;
        let dst = self.require(dst)?;
        Ok(self.add_edge_idx(src, dst, delay.into()))
    }

    pub fn add_edge_idx(&mut self, src: usize, dst: usize, delay: DelayVector) -> usize {
        assert!(src < self.nodes.len() && dst < self.nodes.len());
        self.edges.push(Edge { src, dst, delay });
        self.edges.len() - 1
    }

    pub fn set_time(&mut self, idx: usize, time: u64) {
        self.nodes[idx].time = time;
    }

    pub fn set_statement(&mut self, idx: usize, statement: Option<Statement>) {
        self.nodes[idx].statement = statement;
    }

    /// Same topology and nodes with new edge delays (one per edge, in order).
    pub fn with_delays(&self, delays: Vec<DelayVector>) -> Mdfg {
        assert_eq!(delays.len(), self.edges.len());
        let mut g = self.clone();
        for (e, d) in g.edges.iter_mut().zip(delays) {
            e.delay = d;
        }
        g
    }

    /// Same nodes, keeping only edges for which `keep` holds.
    pub fn filter_edges(&self, keep: impl Fn(&Edge) -> bool) -> Mdfg {
        let mut g = self.clone();
        g.edges.retain(|e| keep(e));
        g
    }

    pub fn zero(&self) -> DelayVector {
        DelayVector::zero(self.dimension)
    }

    pub fn has_zero_delay_edge(&self) -> bool {
        self.edges.iter().any(|e| e.delay.is_zero())
    }

    /// Edge delays keyed by `(src id, dst id, ordinal among parallel edges)`.
    pub fn delay_map(&self) -> BTreeMap<(String, String, usize), DelayVector> {
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let mut out = BTreeMap::new();
        for e in &self.edges {
            let ord = seen.entry((e.src, e.dst)).or_insert(0);
            out.insert(
                (self.nodes[e.src].id.clone(), self.nodes[e.dst].id.clone(), *ord),
                e.delay.clone(),
            );
            *ord += 1;
        }
        out
    }

    /// Node indices sorted by id.
    pub fn sorted_node_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.nodes.len()).collect();
        idx.sort_by(|&a, &b| self.nodes[a].id.cmp(&self.nodes[b].id).then(a.cmp(&b)));
        idx
    }

    /// Checks every structural invariant and returns the violations found.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.dimension;
        if n == 0 {
            out.push(Violation {
                kind: ViolationKind::DimensionMismatch,
                path: "$.dimension".into(),
                message: "dimension must be at least 1".into(),
            });
        }

        let mut first_seen: HashMap<&str, usize> = HashMap::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if let Some(prev) = first_seen.insert(&node.id, i) {
                out.push(Violation {
                    kind: ViolationKind::DuplicateId,
                    path: format!("$.nodes[{i}].id"),
                    message: format!("id `{}` already used by $.nodes[{prev}]", node.id),
                });
            }
            if node.time == 0 {
                out.push(Violation {
                    kind: ViolationKind::NonPositiveTime,
                    path: format!("$.nodes[{i}].time"),
                    message: format!("node `{}` has time 0", node.id),
                });
            }
        }

        for (i, e) in self.edges.iter().enumerate() {
            if e.delay.dim() != n {
                out.push(Violation {
                    kind: ViolationKind::DimensionMismatch,
                    path: format!("$.edges[{i}].delay"),
                    message: format!("delay has {} components, graph dimension is {n}", e.delay.dim()),
                });
            }
        }

        if out.iter().all(|v| v.kind != ViolationKind::DimensionMismatch) {
            if let Err(Error::ZeroDelayCycle(node)) = crate::analysis::zero_delay_topological_order(self) {
                out.push(Violation {
                    kind: ViolationKind::ZeroDelayCycle,
                    path: "$.edges".into(),
                    message: format!("cycle with delay (0,...,0) through node `{node}`"),
                });
            }
        }

        self.validate_statements(&mut out);
        out
    }

    /// Statement templates, where present, must agree with the edges: a
    /// node reading array `X` at offset `o` needs an edge from the producer
    /// of `X` with delay `-o`, and each edge into a templated node needs the
    /// matching operand.
    fn validate_statements(&self, out: &mut Vec<Violation>) {
        let n = self.dimension;
        let mut producer: HashMap<&str, usize> = HashMap::new();
        for (i, node) in self.nodes.iter().enumerate() {
            let Some(st) = &node.statement else { continue };
            if st.target.offset.len() > n || st.operands.iter().any(|o| o.offset.len() > n) {
                out.push(Violation {
                    kind: ViolationKind::DimensionMismatch,
                    path: format!("$.nodes[{i}].statement"),
                    message: format!("index offset longer than dimension {n}"),
                });
                return;
            }
            if let Some(prev) = producer.insert(&st.target.array, i) {
                out.push(Violation {
                    kind: ViolationKind::StatementMismatch,
                    path: format!("$.nodes[{i}].statement.target"),
                    message: format!(
                        "array `{}` is also written by node `{}`",
                        st.target.array, self.nodes[prev].id
                    ),
                });
            }
            if st.op.is_unary() && st.operands.is_empty() {
                out.push(Violation {
                    kind: ViolationKind::StatementMismatch,
                    path: format!("$.nodes[{i}].statement.operands"),
                    message: format!("op `{}` needs an operand", st.op.name()),
                });
            }
        }

        // Multiset of expected (src, dst, delay) from operands versus edges.
        let mut expected: BTreeMap<(usize, usize, Vec<i64>), i64> = BTreeMap::new();
        for (v, node) in self.nodes.iter().enumerate() {
            let Some(st) = &node.statement else { continue };
            let operands = if st.op.is_unary() {
                &st.operands[..st.operands.len().min(1)]
            } else {
                &st.operands[..]
            };
            for op in operands {
                if let Some(&u) = producer.get(op.array.as_str()) {
                    // Instance p of v reads the value written by u's
                    // instance p + o - t_u, where t_u is u's target offset.
                    let src_target = self.nodes[u].statement.as_ref().unwrap().target.offset_in(n);
                    let delay: Vec<i64> = op
                        .offset_in(n)
                        .iter()
                        .zip(&src_target)
                        .map(|(o, tu)| tu - o)
                        .collect();
                    *expected.entry((u, v, delay)).or_insert(0) += 1;
                }
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            let both = self.nodes[e.src].statement.is_some() && self.nodes[e.dst].statement.is_some();
            if !both {
                continue;
            }
            let key = (e.src, e.dst, e.delay.0.clone());
            match expected.get_mut(&key) {
                Some(c) if *c > 0 => *c -= 1,
                _ => out.push(Violation {
                    kind: ViolationKind::StatementMismatch,
                    path: format!("$.edges[{i}]"),
                    message: format!(
                        "no operand of `{}` reads `{}` at delay {}",
                        self.nodes[e.dst].id, self.nodes[e.src].id, e.delay
                    ),
                }),
            }
        }
        for ((u, v, d), c) in expected {
            if c > 0 {
                out.push(Violation {
                    kind: ViolationKind::StatementMismatch,
                    path: format!("$.nodes[{v}].statement.operands"),
                    message: format!(
                        "operand reads `{}` at delay {} but there is no matching edge",
                        self.nodes[u].id,
                        DelayVector(d)
                    ),
                });
            }
        }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(v))
        }
    }
}
