//! Assignment templates attached to graph nodes.
//!
//! A template describes what one instance of a node computes at iteration
//! `p`: it writes `target.array(p + target.offset)` from operands read at
//! `p + operand.offset`. Offsets are constant, so every dependence is uniform.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArrayRef {
    pub array: String,
    #[serde(default)]
    pub offset: Vec<i64>,
}

impl ArrayRef {
    pub fn new(array: impl Into<String>, offset: Vec<i64>) -> Self {
        ArrayRef {
            array: array.into(),
            offset,
        }
    }

    /// Offset padded with zeros up to `dim` components.
    pub fn offset_in(&self, dim: usize) -> Vec<i64> {
        let mut off = self.offset.clone();
        off.resize(dim, 0);
        off
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Op {
    /// Sum of all operands.
    Add,
    /// Product of all operands.
    Mul,
    /// First operand times the constant.
    ConstMul,
    /// First operand plus the constant.
    ConstAdd,
    /// First operand unchanged.
    Copy,
}

impl Op {
    pub fn name(self) -> &'static str {
        match self {
            Op::Add => "add",
            Op::Mul => "mul",
            Op::ConstMul => "const-mul",
            Op::ConstAdd => "const-add",
            Op::Copy => "copy",
        }
    }

    /// Ops that read exactly their first operand.
    pub fn is_unary(self) -> bool {
        matches!(self, Op::ConstMul | Op::ConstAdd | Op::Copy)
    }

    /// Evaluates with wrapping 64-bit arithmetic.
    pub fn eval(self, operands: &[i64], constant: i64) -> i64 {
        match self {
            Op::Add => operands.iter().fold(0i64, |acc, &v| acc.wrapping_add(v)),
            Op::Mul => operands.iter().fold(1i64, |acc, &v| acc.wrapping_mul(v)),
            Op::ConstMul => operands[0].wrapping_mul(constant),
            Op::ConstAdd => operands[0].wrapping_add(constant),
            Op::Copy => operands[0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Statement {
    pub target: ArrayRef,
    pub op: Op,
    pub operands: Vec<ArrayRef>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub constant: i64,
}

fn is_zero(v: &i64) -> bool {
    *v == 0
}

impl Statement {
    pub fn new(target: ArrayRef, op: Op, operands: Vec<ArrayRef>, constant: i64) -> Self {
        Statement {
            target,
            op,
            operands,
            constant,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_ops() {
        assert_eq!(Op::Add.eval(&[1, 2, 3], 0), 6);
        assert_eq!(Op::Mul.eval(&[2, 3, 4], 0), 24);
        assert_eq!(Op::ConstMul.eval(&[7], 5), 35);
        assert_eq!(Op::ConstAdd.eval(&[7], -2), 5);
        assert_eq!(Op::Copy.eval(&[9], 100), 9);
        assert_eq!(Op::Mul.eval(&[i64::MAX, 2], 0), -2);
    }

    #[test]
    fn op_names_round_trip_through_json() {
        for op in [Op::Add, Op::Mul, Op::ConstMul, Op::ConstAdd, Op::Copy] {
            let s = serde_json::to_string(&op).unwrap();
            assert_eq!(s, format!("\"{}\"", op.name()));
            let back: Op = serde_json::from_str(&s).unwrap();
            assert_eq!(back, op);
        }
    }
}
