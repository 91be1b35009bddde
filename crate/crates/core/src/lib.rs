//! A small modeling kernel: class models written in a PlantUML subset,
//! object models that instantiate them, an OCL invariant interpreter,
//! pluggable model-to-text generators, finite-state machines, and
//! flexible conformance (metamodel inference and pruning).

pub mod codegen;
pub mod diagnostic;
pub mod exec;
pub mod flex;
pub mod fsm;
pub mod model;
pub mod ocl;
pub mod plantuml;

pub use diagnostic::{Code, Diagnostic, Severity, SourceSpan};
pub use exec::Execution;
