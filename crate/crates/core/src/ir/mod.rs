//! Internal representation: per-function CFGs, the per-unit call graph,
//! and the unit manager that builds units on demand under a budget.

mod cfg;
mod manager;
mod unit;

pub use cfg::{Cfg, CfgNode, Edge, EdgeLabel, NodeId, NodeKind};
pub use manager::{build_unit, ManagerStats, MemoryBudget, UnitError, UnitManager};
pub use unit::{CallEdge, CallGraph, Callee, Function, TranslationUnit};

use crate::frontend::SourceLocation;

#[derive(Debug, thiserror::Error)]
pub enum IrError {
    #[error("{location}: goto to undefined label `{label}` in {function}")]
    UndefinedLabel {
        function: String,
        label: String,
        location: SourceLocation,
    },
    #[error("{location}: label `{label}` defined twice in {function}")]
    DuplicateLabel {
        function: String,
        label: String,
        location: SourceLocation,
    },
    #[error("{location}: break or continue outside a loop in {function}")]
    JumpOutsideLoop {
        function: String,
        location: SourceLocation,
    },
    #[error("function {0} is defined more than once")]
    DuplicateFunction(String),
    #[error("malformed function definition {0}")]
    MalformedFunction(String),
}
