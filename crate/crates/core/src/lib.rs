//! Multidimensional retiming of nested-loop data-flow graphs.
//!
//! A loop body is modelled as an [`Mdfg`]: nodes are statements with an
//! execution time, edges carry the iteration distance of the dependence.
//! The [`techniques`] remove zero-delay edges by retiming, [`codegen`]
//! turns a retiming back into a loop nest with prologues and epilogues,
//! and [`simulator`] runs original and generated programs side by side.

pub mod analysis;
pub mod cdg;
pub mod codegen;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod mdfg;
pub mod random;
pub mod retiming;
pub mod schedule;
pub mod simulator;
pub mod statement;
pub mod techniques;

pub use cdg::IterationBounds;
pub use error::{Error, Result};
pub use mdfg::{DelayVector, Edge, Mdfg, Node, Violation, ViolationKind};
pub use retiming::Retiming;
pub use schedule::ScheduleVector;
pub use statement::{ArrayRef, Op, Statement};
pub use techniques::{Technique, TechniqueResult};
