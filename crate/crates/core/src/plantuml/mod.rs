//! Textual concrete syntax: class models in a PlantUML subset
//! (`.buml.puml`) and a companion object-model syntax (`.objs`).

mod class_syntax;
pub(crate) mod lexer;
mod object_syntax;

pub(crate) use class_syntax::Cursor;
pub use class_syntax::{parse_class_model, parse_class_model_file, serialize_class_model};
pub(crate) use object_syntax::literal_value;
pub use object_syntax::{
    parse_object_model, parse_object_model_file, parse_object_model_standalone,
    serialize_object_model,
};

use crate::diagnostic::Diagnostic;

/// Outcome of a parse: `model` is present iff `diagnostics` holds no errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseResult<T> {
    pub model: Option<T>,
    pub diagnostics: Vec<Diagnostic>,
}

impl<T> ParseResult<T> {
    pub fn into_result(self) -> Result<(T, Vec<Diagnostic>), Vec<Diagnostic>> {
        match self.model {
            Some(m) => Ok((m, self.diagnostics)),
            None => Err(self.diagnostics),
        }
    }
}
