//! JSON graph files.
//!
//! ```json
//! {"dimension": 2,
//!  "nodes": [{"id": "A", "time": 1,
//!             "statement": {"target": {"array": "A", "offset": [0, 0]},
//!                           "op": "const-mul",
//!                           "operands": [{"array": "D", "offset": [0, 0]}],
//!                           "constant": 5}}],
//!  "edges": [{"src": "D", "dst": "A", "delay": [0, 0]}]}
//! ```
//!
//! A retimed file adds `retiming` (node id to vector, zero entries
//! omitted) and optionally `schedule`, `base_r`, `function_count` and
//! `technique`. Every problem found while loading is reported with its
//! JSON path.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::mdfg::{DelayVector, Mdfg, Node, Violation, ViolationKind};
use crate::retiming::Retiming;
use crate::schedule::ScheduleVector;
use crate::statement::Statement;
use crate::techniques::{Technique, TechniqueResult};

/// Contents of a graph file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFile {
    pub graph: Mdfg,
    pub retiming: Option<Retiming>,
    pub schedule: Option<ScheduleVector>,
    pub base_r: Option<DelayVector>,
    pub function_count: Option<u64>,
    pub technique: Option<Technique>,
}

impl GraphFile {
    pub fn plain(graph: Mdfg) -> Self {
        GraphFile {
            graph,
            retiming: None,
            schedule: None,
            base_r: None,
            function_count: None,
            technique: None,
        }
    }

    /// The graph as retimed by a technique: the original plus its
    /// retiming and the basis it was built from.
    pub fn from_result(original: &Mdfg, result: &TechniqueResult) -> Self {
        GraphFile {
            graph: original.clone(),
            retiming: Some(result.retiming.clone()),
            schedule: Some(result.schedule.clone()),
            base_r: Some(result.base_r.clone()),
            function_count: Some(result.function_count),
            technique: Some(result.technique),
        }
    }

    pub fn to_value(&self) -> Value {
        let mut v = graph_to_value(&self.graph);
        let obj = v.as_object_mut().expect("graph serializes to an object");
        if let Some(r) = &self.retiming {
            let map: Map<String, Value> = r
                .iter()
                .map(|(id, d)| (id.to_string(), json!(d.components())))
                .collect();
            obj.insert("retiming".into(), Value::Object(map));
        }
        if let Some(s) = &self.schedule {
            obj.insert("schedule".into(), json!(s.components()));
        }
        if let Some(b) = &self.base_r {
            obj.insert("base_r".into(), json!(b.components()));
        }
        if let Some(c) = self.function_count {
            obj.insert("function_count".into(), json!(c));
        }
        if let Some(t) = self.technique {
            obj.insert("technique".into(), json!(t.name()));
        }
        v
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("value serializes");
        s.push('\n');
        s
    }
}

pub fn graph_to_value(g: &Mdfg) -> Value {
    let nodes: Vec<Value> = g
        .nodes()
        .iter()
        .map(|n| {
            let mut obj = Map::new();
            obj.insert("id".into(), json!(n.id));
            obj.insert("time".into(), json!(n.time));
            if let Some(st) = &n.statement {
                obj.insert("statement".into(), serde_json::to_value(st).expect("statement serializes"));
            }
            Value::Object(obj)
        })
        .collect();
    let edges: Vec<Value> = g
        .edges()
        .iter()
        .map(|e| {
            json!({
                "src": g.node(e.src).id,
                "dst": g.node(e.dst).id,
                "delay": e.delay.components(),
            })
        })
        .collect();
    json!({"dimension": g.dimension(), "nodes": nodes, "edges": edges})
}

pub fn graph_to_json(g: &Mdfg) -> String {
    GraphFile::plain(g.clone()).to_json()
}

pub fn load_graph_file(path: &Path) -> Result<GraphFile> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Invalid(vec![malformed("$", format!("cannot read {}: {e}", path.display()))])
    })?;
    parse_graph_file(&text)
}

pub fn parse_graph(text: &str) -> Result<Mdfg> {
    parse_graph_file(text).map(|f| f.graph)
}

/// Parses and validates a graph file, collecting every violation.
pub fn parse_graph_file(text: &str) -> Result<GraphFile> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Invalid(vec![malformed("$", e.to_string())]))?;
    let mut out = Vec::new();
    let Some(obj) = root.as_object() else {
        return Err(Error::Invalid(vec![malformed("$", "expected an object".into())]));
    };

    let dimension = match obj.get("dimension").map(Value::as_u64) {
        Some(Some(d)) if d >= 1 => d as usize,
        Some(_) => {
            out.push(malformed("$.dimension", "expected a positive integer".into()));
            0
        }
        None => {
            out.push(malformed("$.dimension", "missing".into()));
            0
        }
    };

    let mut g = Mdfg::new(dimension);
    let node_items = array_at(obj, "nodes", &mut out);
    for (i, item) in node_items.iter().enumerate() {
        if let Some(node) = parse_node(item, &format!("$.nodes[{i}]"), &mut out) {
            g.push_node(node);
        }
    }

    let ids: HashSet<&str> = node_items
        .iter()
        .filter_map(|n| n.get("id").and_then(Value::as_str))
        .collect();
    let mut edges = Vec::new();
    for (i, item) in array_at(obj, "edges", &mut out).iter().enumerate() {
        let path = format!("$.edges[{i}]");
        let Some(e) = item.as_object() else {
            out.push(malformed(&path, "expected an object".into()));
            continue;
        };
        let src = endpoint(e, "src", &path, &ids, &mut out);
        let dst = endpoint(e, "dst", &path, &ids, &mut out);
        let delay_path = format!("{path}.delay");
        let delay = int_vec(e.get("delay"), &delay_path, &mut out);
        if let Some(d) = &delay {
            if dimension > 0 && d.len() != dimension {
                out.push(dim_mismatch(&delay_path, d.len(), dimension));
            }
        }
        if let (Some(src), Some(dst), Some(delay)) = (src, dst, delay) {
            edges.push((src, dst, DelayVector(delay)));
        }
    }

    let retiming = obj.get("retiming").and_then(|v| {
        let Some(map) = v.as_object() else {
            out.push(malformed("$.retiming", "expected an object".into()));
            return None;
        };
        let mut r = BTreeMap::new();
        for (id, d) in map {
            let path = format!("$.retiming.{id}");
            if !ids.contains(id.as_str()) {
                out.push(Violation {
                    kind: ViolationKind::UnknownNode,
                    path: path.clone(),
                    message: format!("no node `{id}`"),
                });
            }
            if let Some(d) = int_vec(Some(d), &path, &mut out) {
                if d.len() != dimension {
                    out.push(dim_mismatch(&path, d.len(), dimension));
                }
                r.insert(id.clone(), DelayVector(d));
            }
        }
        Retiming::from_map(dimension, r).ok()
    });
    let schedule = obj.get("schedule").and_then(|v| {
        let c = int_vec(Some(v), "$.schedule", &mut out)?;
        match ScheduleVector::new(c) {
            Ok(s) => Some(s),
            Err(e) => {
                out.push(malformed("$.schedule", e.to_string()));
                None
            }
        }
    });
    let base_r = obj
        .get("base_r")
        .and_then(|v| int_vec(Some(v), "$.base_r", &mut out))
        .map(DelayVector);
    let function_count = obj.get("function_count").and_then(|v| {
        let c = v.as_u64();
        if c.is_none() {
            out.push(malformed("$.function_count", "expected a non-negative integer".into()));
        }
        c
    });
    let technique = obj.get("technique").and_then(|v| match v.as_str().map(str::parse::<Technique>) {
        Some(Ok(t)) => Some(t),
        Some(Err(msg)) => {
            out.push(malformed("$.technique", msg));
            None
        }
        None => {
            out.push(malformed("$.technique", "expected a string".into()));
            None
        }
    });

    for (src, dst, delay) in edges {
        let (s, d) = (g.index_of(&src), g.index_of(&dst));
        if let (Some(s), Some(d)) = (s, d) {
            g.add_edge_idx(s, d, delay);
        }
    }
    if out.is_empty() {
        out.extend(g.validate());
    }
    if !out.is_empty() {
        return Err(Error::Invalid(out));
    }
    Ok(GraphFile {
        graph: g,
        retiming,
        schedule,
        base_r,
        function_count,
        technique,
    })
}

fn malformed(path: &str, message: String) -> Violation {
    Violation {
        kind: ViolationKind::Malformed,
        path: path.to_string(),
        message,
    }
}

fn dim_mismatch(path: &str, got: usize, expected: usize) -> Violation {
    Violation {
        kind: ViolationKind::DimensionMismatch,
        path: path.to_string(),
        message: format!("{got} components, graph dimension is {expected}"),
    }
}

fn array_at<'a>(obj: &'a Map<String, Value>, key: &str, out: &mut Vec<Violation>) -> &'a [Value] {
    match obj.get(key) {
        Some(Value::Array(items)) => items,
        Some(_) => {
            out.push(malformed(&format!("$.{key}"), "expected an array".into()));
            &[]
        }
        None => {
            out.push(malformed(&format!("$.{key}"), "missing".into()));
            &[]
        }
    }
}

fn parse_node(item: &Value, path: &str, out: &mut Vec<Violation>) -> Option<Node> {
    let Some(n) = item.as_object() else {
        out.push(malformed(path, "expected an object".into()));
        return None;
    };
    let id = n.get("id").and_then(Value::as_str);
    if id.is_none() {
        out.push(malformed(&format!("{path}.id"), "expected a string".into()));
    }
    let time = n.get("time").and_then(Value::as_u64);
    if time.is_none() {
        out.push(malformed(&format!("{path}.time"), "expected a non-negative integer".into()));
    }
    let statement = match n.get("statement") {
        None | Some(Value::Null) => Some(None),
        Some(v) => match serde_json::from_value::<Statement>(v.clone()) {
            Ok(st) => Some(Some(st)),
            Err(e) => {
                out.push(malformed(&format!("{path}.statement"), e.to_string()));
                None
            }
        },
    };
    Some(Node {
        id: id?.to_string(),
        time: time?,
        statement: statement?,
    })
}

fn endpoint(
    e: &Map<String, Value>,
    key: &str,
    path: &str,
    ids: &HashSet<&str>,
    out: &mut Vec<Violation>,
) -> Option<String> {
    let path = format!("{path}.{key}");
    let Some(id) = e.get(key).and_then(Value::as_str) else {
        out.push(malformed(&path, "expected a node id".into()));
        return None;
    };
    if !ids.contains(id) {
        out.push(Violation {
            kind: ViolationKind::UnknownNode,
            path,
            message: format!("no node `{id}`"),
        });
        return None;
    }
    Some(id.to_string())
}

fn int_vec(v: Option<&Value>, path: &str, out: &mut Vec<Violation>) -> Option<Vec<i64>> {
    let parsed = v
        .and_then(Value::as_array)
        .and_then(|items| items.iter().map(Value::as_i64).collect::<Option<Vec<i64>>>());
    if parsed.is_none() {
        out.push(malformed(path, "expected an array of integers".into()));
    }
    parsed
}
