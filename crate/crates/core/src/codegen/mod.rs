//! Model-to-text generation: a registry of generators keyed by id and two
//! built-in targets, plain classes (`classes`) and SQL DDL (`sql`).

mod classes;
mod sql;

use std::fmt;
use std::path::{Component, Path};

use heck::ToSnakeCase;

use crate::diagnostic::{has_errors, Code, Diagnostic};
use crate::model::{validate_class_model, ClassModel};

pub use classes::generate_plain_classes;
pub use sql::generate_sql_ddl;

/// One output file. Paths are relative, use `/` and never climb out of the
/// output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedArtifact {
    pub relative_path: String,
    pub content: String,
}

impl GeneratedArtifact {
    pub fn new(relative_path: impl Into<String>, content: impl Into<String>) -> Self {
        let relative_path = relative_path.into();
        assert!(
            is_normalized_relative(&relative_path),
            "artifact path `{relative_path}` must be a normalized relative path"
        );
        GeneratedArtifact {
            relative_path,
            content: content.into(),
        }
    }
}

pub fn is_normalized_relative(path: &str) -> bool {
    !path.is_empty()
        && !path.contains('\\')
        && !path.split('/').any(|seg| seg.is_empty() || seg == ".")
        && Path::new(path)
            .components()
            .all(|c| matches!(c, Component::Normal(_)))
}

/// Artifacts plus any non-fatal diagnostics (warnings).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GenOutput {
    pub artifacts: Vec<GeneratedArtifact>,
    pub diagnostics: Vec<Diagnostic>,
}

pub type GenResult = Result<GenOutput, Vec<Diagnostic>>;

pub type ProduceFn = dyn Fn(&ClassModel) -> GenResult + Send + Sync;

pub struct GeneratorDescriptor {
    pub id: String,
    pub display_name: String,
    pub produce: Box<ProduceFn>,
}

impl GeneratorDescriptor {
    pub fn new(
        id: impl Into<String>,
        display_name: impl Into<String>,
        produce: impl Fn(&ClassModel) -> GenResult + Send + Sync + 'static,
    ) -> Self {
        GeneratorDescriptor {
            id: id.into(),
            display_name: display_name.into(),
            produce: Box::new(produce),
        }
    }
}

impl fmt::Debug for GeneratorDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorDescriptor")
            .field("id", &self.id)
            .field("display_name", &self.display_name)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Default)]
pub struct GeneratorRegistry {
    generators: Vec<GeneratorDescriptor>,
}

impl GeneratorRegistry {
    pub fn new() -> Self {
        GeneratorRegistry::default()
    }

    /// `classes` then `sql`.
    pub fn with_builtins() -> Self {
        let mut r = GeneratorRegistry::new();
        r.register(GeneratorDescriptor::new(
            "classes",
            "Plain classes",
            generate_plain_classes,
        ))
        .expect("fresh registry");
        r.register(GeneratorDescriptor::new("sql", "SQL DDL", generate_sql_ddl))
            .expect("fresh registry");
        r
    }

    pub fn register(&mut self, descriptor: GeneratorDescriptor) -> Result<(), Diagnostic> {
        if self.get(&descriptor.id).is_some() {
            return Err(Diagnostic::error(
                Code::DupGenerator,
                format!("generator `{}` is already registered", descriptor.id),
            ));
        }
        self.generators.push(descriptor);
        Ok(())
    }

    /// Ids in registration order.
    pub fn list(&self) -> Vec<&str> {
        self.generators.iter().map(|g| g.id.as_str()).collect()
    }

    pub fn get(&self, id: &str) -> Option<&GeneratorDescriptor> {
        self.generators.iter().find(|g| g.id == id)
    }

    /// Runs generator `id`. The model is validated first; validation errors
    /// are returned as-is.
    pub fn generate(&self, id: &str, model: &ClassModel) -> GenResult {
        let Some(g) = self.get(id) else {
            return Err(vec![Diagnostic::error(
                Code::NoSuchGenerator,
                format!("no generator `{id}`; available: {}", self.list().join(", ")),
            )]);
        };
        let validation = validate_class_model(model);
        if has_errors(&validation) {
            return Err(validation);
        }
        (g.produce)(model)
    }
}

pub(crate) fn snake(name: &str) -> String {
    name.to_snake_case()
}

/// Indentation-aware text builder. Output always uses `\n`.
#[derive(Debug, Default)]
pub(crate) struct CodeWriter {
    out: String,
    indent: usize,
}

impl CodeWriter {
    pub(crate) fn line(&mut self, text: &str) -> &mut Self {
        if !text.is_empty() {
            for _ in 0..self.indent {
                self.out.push_str("    ");
            }
            self.out.push_str(text);
        }
        self.out.push('\n');
        self
    }

    pub(crate) fn blank(&mut self) -> &mut Self {
        self.line("")
    }

    pub(crate) fn indent(&mut self) -> &mut Self {
        self.indent += 1;
        self
    }

    pub(crate) fn dedent(&mut self) -> &mut Self {
        self.indent = self.indent.saturating_sub(1);
        self
    }

    pub(crate) fn finish(self) -> String {
        self.out
    }
}
