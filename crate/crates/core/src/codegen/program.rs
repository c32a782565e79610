//! Loop-program AST and its C-like printer.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cdg::IterationBounds;
use crate::error::{Error, Result};
use crate::schedule::ScheduleVector;
use crate::statement::Op;

/// What an index expression is anchored to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "dim")]
pub enum IndexBase {
    /// Loop variable of the given nesting level.
    Loop(usize),
    /// Lower bound of the given dimension.
    Lower(usize),
    /// Upper bound of the given dimension.
    Upper(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexExpr {
    pub base: IndexBase,
    pub offset: i64,
}

impl IndexExpr {
    pub fn new(base: IndexBase, offset: i64) -> Self {
        IndexExpr { base, offset }
    }

    pub fn shifted(self, by: i64) -> Self {
        IndexExpr {
            base: self.base,
            offset: self.offset + by,
        }
    }

    /// Concrete value given the loop variables bound so far.
    pub fn eval(&self, bounds: &IterationBounds, vars: &[Option<i64>]) -> Result<i64> {
        let base = match self.base {
            IndexBase::Loop(k) => vars
                .get(k)
                .copied()
                .flatten()
                .ok_or_else(|| Error::MalformedProgram(format!("loop variable {k} is not bound here")))?,
            IndexBase::Lower(k) => *bounds
                .lower
                .get(k)
                .ok_or_else(|| Error::MalformedProgram(format!("no lower bound for dimension {k}")))?,
            IndexBase::Upper(k) => *bounds
                .upper
                .get(k)
                .ok_or_else(|| Error::MalformedProgram(format!("no upper bound for dimension {k}")))?,
        };
        Ok(base + self.offset)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayAccess {
    pub array: String,
    pub index: Vec<IndexExpr>,
}

/// One statement instance pattern: node `node` at retimed iteration
/// `iteration` writes `target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assign {
    pub node: String,
    pub iteration: Vec<IndexExpr>,
    pub target: ArrayAccess,
    pub op: Op,
    pub operands: Vec<ArrayAccess>,
    #[serde(default)]
    pub constant: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopNest {
    pub level: usize,
    pub lower: IndexExpr,
    pub upper: IndexExpr,
    pub body: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Item {
    Assign(Assign),
    Loop(LoopNest),
}

/// A generated loop program. Each level is a run of unrolled prologue
/// items, at most one loop, and unrolled epilogue items.
///
/// Statement instances execute in schedule-major order of their
/// iteration vectors, ties in program order. Under the row-major schedule
/// this is exactly textual order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedProgram {
    pub dimension: usize,
    pub bounds: IterationBounds,
    pub schedule: ScheduleVector,
    pub items: Vec<Item>,
}

impl GeneratedProgram {
    /// Empty program (no statements, no loops).
    pub fn empty(bounds: IterationBounds) -> Self {
        let dimension = bounds.dim();
        GeneratedProgram {
            dimension,
            schedule: ScheduleVector::row_major(dimension.max(1)),
            bounds,
            items: Vec::new(),
        }
    }

    /// Assignment statements plus loop headers.
    pub fn code_size(&self) -> u64 {
        fn walk(items: &[Item]) -> u64 {
            items
                .iter()
                .map(|it| match it {
                    Item::Assign(_) => 1,
                    Item::Loop(l) => 1 + walk(&l.body),
                })
                .sum()
        }
        walk(&self.items)
    }

    pub fn assign_count(&self) -> u64 {
        fn walk(items: &[Item]) -> u64 {
            items
                .iter()
                .map(|it| match it {
                    Item::Assign(_) => 1,
                    Item::Loop(l) => walk(&l.body),
                })
                .sum()
        }
        walk(&self.items)
    }

    pub fn loop_count(&self) -> u64 {
        self.code_size() - self.assign_count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("program serializes")
    }

    pub fn print(&self, opts: &PrintOptions) -> String {
        let mut out = String::new();
        if !self.schedule.is_row_major() {
            let _ = writeln!(
                out,
                "// iterations execute in wavefront order of schedule s = {}",
                self.schedule
            );
        }
        self.print_items(&self.items, 0, opts, &mut out);
        out
    }

    fn print_items(&self, items: &[Item], depth: usize, opts: &PrintOptions, out: &mut String) {
        let pad = "  ".repeat(depth);
        for item in items {
            match item {
                Item::Assign(a) => {
                    let _ = writeln!(out, "{pad}{};", self.render_assign(a, opts));
                }
                Item::Loop(l) => {
                    let var = opts.loop_var(l.level);
                    let _ = writeln!(
                        out,
                        "{pad}for ({var} = {}; {var} <= {}; {var}++) {{",
                        self.render_index(&l.lower, opts),
                        self.render_index(&l.upper, opts)
                    );
                    self.print_items(&l.body, depth + 1, opts, out);
                    let _ = writeln!(out, "{pad}}}");
                }
            }
        }
    }

    fn render_assign(&self, a: &Assign, opts: &PrintOptions) -> String {
        let ops: Vec<String> = a.operands.iter().map(|o| self.render_access(o, opts)).collect();
        let rhs = match a.op {
            Op::Add if ops.is_empty() => "0".to_string(),
            Op::Mul if ops.is_empty() => "1".to_string(),
            Op::Add => ops.join(" + "),
            Op::Mul => ops.join(" * "),
            Op::ConstMul => format!("{} * {}", ops[0], a.constant),
            Op::ConstAdd if a.constant < 0 => format!("{} - {}", ops[0], -a.constant),
            Op::ConstAdd => format!("{} + {}", ops[0], a.constant),
            Op::Copy => ops[0].clone(),
        };
        format!("{} = {rhs}", self.render_access(&a.target, opts))
    }

    fn render_access(&self, acc: &ArrayAccess, opts: &PrintOptions) -> String {
        let mut s = acc.array.clone();
        for ix in &acc.index {
            let _ = write!(s, "[{}]", self.render_index(ix, opts));
        }
        s
    }

    fn render_index(&self, ix: &IndexExpr, opts: &PrintOptions) -> String {
        let with_offset = |name: String| match ix.offset {
            0 => name,
            o if o > 0 => format!("{name}+{o}"),
            o => format!("{name}{o}"),
        };
        match ix.base {
            IndexBase::Loop(k) => with_offset(opts.loop_var(k)),
            IndexBase::Lower(k) => (self.bounds.lower[k] + ix.offset).to_string(),
            IndexBase::Upper(k) => match &opts.upper_names {
                Some(names) => with_offset(names[k].clone()),
                None => (self.bounds.upper[k] + ix.offset).to_string(),
            },
        }
    }
}

/// Naming used by the printer. With `upper_names` set, upper bounds print
/// symbolically (`n-1`); otherwise every bound prints as a number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrintOptions {
    pub loop_vars: Vec<String>,
    pub upper_names: Option<Vec<String>>,
}

impl PrintOptions {
    /// `i, j, k` loop variables and `m, n` (or `N0, N1, ...`) upper bounds.
    pub fn symbolic(dim: usize) -> Self {
        PrintOptions {
            loop_vars: default_loop_vars(dim),
            upper_names: Some(default_upper_names(dim)),
        }
    }

    pub fn concrete(dim: usize) -> Self {
        PrintOptions {
            loop_vars: default_loop_vars(dim),
            upper_names: None,
        }
    }

    fn loop_var(&self, k: usize) -> String {
        self.loop_vars.get(k).cloned().unwrap_or_else(|| format!("i{k}"))
    }
}

pub fn default_loop_vars(dim: usize) -> Vec<String> {
    if dim <= 3 {
        ["i", "j", "k"][..dim].iter().map(|s| s.to_string()).collect()
    } else {
        (0..dim).map(|k| format!("i{k}")).collect()
    }
}

pub fn default_upper_names(dim: usize) -> Vec<String> {
    if dim <= 2 {
        ["m", "n"][2 - dim..].iter().map(|s| s.to_string()).collect()
    } else {
        (0..dim).map(|k| format!("N{k}")).collect()
    }
}
