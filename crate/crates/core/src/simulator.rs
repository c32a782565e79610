//! Concrete execution of generated loop programs.
//!
//! Arithmetic is wrapping `i64`. Reads of cells never written, in or out
//! of bounds, yield 0.
//!
//! Random input stores come from a 64-bit linear congruential generator
//! `x' = x * 6364136223846793005 + 1442695040888963407 (mod 2^64)`,
//! seeded with the trial number. Each value is `(x' >> 33) % 201 - 100`,
//! so inputs lie in `[-100, 100]`. Arrays are filled in name order, cells
//! in row-major order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::cdg::{schedule_major_key, IterationBounds};
use crate::codegen::{Assign, GeneratedProgram, Item, INSTANCE_LIMIT};
use crate::error::{Error, Result};

/// Integer arrays keyed by name, then index tuple.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ArrayStore {
    arrays: BTreeMap<String, BTreeMap<Vec<i64>, i64>>,
}

impl ArrayStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, array: &str, index: &[i64]) -> i64 {
        self.arrays
            .get(array)
            .and_then(|a| a.get(index))
            .copied()
            .unwrap_or(0)
    }

    pub fn set(&mut self, array: &str, index: Vec<i64>, value: i64) {
        self.arrays.entry(array.to_string()).or_default().insert(index, value);
    }

    pub fn array_names(&self) -> impl Iterator<Item = &str> {
        self.arrays.keys().map(String::as_str)
    }

    pub fn cells(&self, array: &str) -> impl Iterator<Item = (&Vec<i64>, i64)> {
        self.arrays.get(array).into_iter().flat_map(|a| a.iter().map(|(k, &v)| (k, v)))
    }

    /// Number of stored cells over all arrays.
    pub fn len(&self) -> usize {
        self.arrays.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sorted `array[i,j] = value` lines.
    pub fn dump(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ArrayStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, cells) in &self.arrays {
            for (index, value) in cells {
                let ix: Vec<String> = index.iter().map(i64::to_string).collect();
                writeln!(f, "{name}[{}] = {value}", ix.join(","))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub node: String,
    pub index: Vec<i64>,
    pub value: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExecutionTrace {
    pub entries: Vec<TraceEntry>,
}

impl ExecutionTrace {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Executed instances per node.
    pub fn counts(&self) -> BTreeMap<&str, usize> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            *out.entry(e.node.as_str()).or_insert(0) += 1;
        }
        out
    }
}

struct Instance<'a> {
    iteration: Vec<i64>,
    assign: &'a Assign,
    vars: Vec<Option<i64>>,
}

/// Runs `program` on a copy of `inputs`.
pub fn run(program: &GeneratedProgram, bounds: &IterationBounds, inputs: &ArrayStore) -> Result<ArrayStore> {
    run_traced(program, bounds, inputs).map(|(store, _)| store)
}

/// Runs `program` on a copy of `inputs`, recording every write.
///
/// Instances are expanded in program order and then executed in
/// schedule-major order of their iteration vectors, ties in program
/// order; for the row-major schedule the two orders coincide.
pub fn run_traced(
    program: &GeneratedProgram,
    bounds: &IterationBounds,
    inputs: &ArrayStore,
) -> Result<(ArrayStore, ExecutionTrace)> {
    let dim = program.dimension;
    bounds.check_dim(dim)?;
    let mut instances = Vec::new();
    let mut vars = vec![None; dim];
    expand(&program.items, bounds, &mut vars, &mut instances)?;
    let s = program.schedule.components();
    if !program.schedule.is_row_major() {
        instances.sort_by_cached_key(|inst| schedule_major_key(&inst.iteration, s));
    }

    let mut store = inputs.clone();
    let mut trace = ExecutionTrace::default();
    for inst in &instances {
        let a = inst.assign;
        let mut values = Vec::with_capacity(a.operands.len());
        for op in &a.operands {
            let index = eval_all(&op.index, bounds, &inst.vars)?;
            values.push(store.get(&op.array, &index));
        }
        let value = a.op.eval(&values, a.constant);
        let index = eval_all(&a.target.index, bounds, &inst.vars)?;
        trace.entries.push(TraceEntry {
            node: a.node.clone(),
            index: index.clone(),
            value,
        });
        store.set(&a.target.array, index, value);
    }
    Ok((store, trace))
}

fn eval_all(index: &[crate::codegen::IndexExpr], bounds: &IterationBounds, vars: &[Option<i64>]) -> Result<Vec<i64>> {
    index.iter().map(|ix| ix.eval(bounds, vars)).collect()
}

fn expand<'a>(
    items: &'a [Item],
    bounds: &IterationBounds,
    vars: &mut Vec<Option<i64>>,
    out: &mut Vec<Instance<'a>>,
) -> Result<()> {
    for item in items {
        match item {
            Item::Assign(a) => {
                if out.len() as u128 >= INSTANCE_LIMIT {
                    return Err(Error::InstanceLimit {
                        instances: out.len() as u128 + 1,
                        limit: INSTANCE_LIMIT,
                    });
                }
                out.push(Instance {
                    iteration: eval_all(&a.iteration, bounds, vars)?,
                    assign: a,
                    vars: vars.clone(),
                });
            }
            Item::Loop(l) => {
                if l.level >= vars.len() {
                    return Err(Error::MalformedProgram(format!("loop level {} out of range", l.level)));
                }
                let lo = l.lower.eval(bounds, vars)?;
                let hi = l.upper.eval(bounds, vars)?;
                let saved = vars[l.level];
                for v in lo..=hi {
                    vars[l.level] = Some(v);
                    expand(&l.body, bounds, vars, out)?;
                }
                vars[l.level] = saved;
            }
        }
    }
    Ok(())
}

/// Multiplier and increment of the input generator.
pub const LCG_MULTIPLIER: u64 = 6364136223846793005;
pub const LCG_INCREMENT: u64 = 1442695040888963407;

#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    /// Next value in `[-100, 100]`.
    pub fn next_value(&mut self) -> i64 {
        self.state = self.state.wrapping_mul(LCG_MULTIPLIER).wrapping_add(LCG_INCREMENT);
        ((self.state >> 33) % 201) as i64 - 100
    }
}

/// Arrays named anywhere in `program`, sorted.
pub fn referenced_arrays(program: &GeneratedProgram) -> BTreeSet<String> {
    fn walk(items: &[Item], out: &mut BTreeSet<String>) {
        for item in items {
            match item {
                Item::Assign(a) => {
                    out.insert(a.target.array.clone());
                    out.extend(a.operands.iter().map(|o| o.array.clone()));
                }
                Item::Loop(l) => walk(&l.body, out),
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(&program.items, &mut out);
    out
}

/// Arrays written by some statement of `program`, sorted.
pub fn written_arrays(program: &GeneratedProgram) -> BTreeSet<String> {
    fn walk(items: &[Item], out: &mut BTreeSet<String>) {
        for item in items {
            match item {
                Item::Assign(a) => {
                    out.insert(a.target.array.clone());
                }
                Item::Loop(l) => walk(&l.body, out),
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(&program.items, &mut out);
    out
}

/// In-bounds cells of `arrays`, each filled from `seed`.
pub fn random_inputs(arrays: &BTreeSet<String>, bounds: &IterationBounds, seed: u64) -> ArrayStore {
    let mut rng = Lcg::new(seed);
    let mut store = ArrayStore::new();
    for name in arrays {
        for cell in bounds.cells() {
            let v = rng.next_value();
            store.set(name, cell, v);
        }
    }
    store
}

/// Whether `p1` and `p2` leave the same values in every in-bounds cell of
/// the arrays they write, over `trials` seeded random inputs.
pub fn equivalent(p1: &GeneratedProgram, p2: &GeneratedProgram, bounds: &IterationBounds, trials: u64) -> bool {
    equivalence_report(p1, p2, bounds, trials).is_ok()
}

/// Like [`equivalent`], but returns the first differing cell.
pub fn equivalence_report(
    p1: &GeneratedProgram,
    p2: &GeneratedProgram,
    bounds: &IterationBounds,
    trials: u64,
) -> std::result::Result<(), String> {
    let mut arrays = referenced_arrays(p1);
    arrays.extend(referenced_arrays(p2));
    let mut written = written_arrays(p1);
    written.extend(written_arrays(p2));
    for seed in 1..=trials {
        let inputs = random_inputs(&arrays, bounds, seed);
        let a = run(p1, bounds, &inputs).map_err(|e| format!("first program: {e}"))?;
        let b = run(p2, bounds, &inputs).map_err(|e| format!("second program: {e}"))?;
        for name in &written {
            for cell in bounds.cells() {
                let (x, y) = (a.get(name, &cell), b.get(name, &cell));
                if x != y {
                    return Err(format!("seed {seed}: {name}{cell:?} is {x} vs {y}"));
                }
            }
        }
    }
    Ok(())
}
