//! Invariants over object models: a subset of OCL with navigation,
//! arithmetic, boolean logic and the common collection operations.

mod ast;
mod eval;
mod parse;

pub use ast::{BinaryOp, CollectionOpKind, OclConstraint, OclExpr, UnaryOp};
pub use eval::{
    apply_strict, check_all, check_all_with, evaluate_constraint, evaluate_constraint_with,
    evaluate_expression, values_equal, Binding, EvalError, EvalResult, Evaluator, InstanceResult,
    OclValue, Verdict,
};
pub use parse::{parse_expression, parse_ocl, parse_ocl_file};
