//! Plain Python-style classes, one file per class.
//!
//! ```text
//! class Design(Stage):
//!     passport: "ProductPassport | None"
//!
//!     def __init__(self, start_date):
//!         self.start_date = start_date
//! ```
//!
//! The constructor takes the flattened attribute list in order. Navigable
//! association ends are declared as annotations: collections when the upper
//! bound exceeds one, otherwise an optional reference.

use std::collections::HashMap;

use crate::diagnostic::{Code, Diagnostic};
use crate::model::ClassModel;

use super::{snake, CodeWriter, GenOutput, GenResult, GeneratedArtifact};

pub fn generate_plain_classes(model: &ClassModel) -> GenResult {
    let mut errors = Vec::new();
    let mut files: HashMap<String, &str> = HashMap::new();
    let mut artifacts = Vec::new();
    for class in &model.classes {
        let path = format!("{}.gen", snake(&class.name));
        if let Some(prev) = files.insert(path.clone(), &class.name) {
            errors.push(Diagnostic::error(
                Code::NameCollision,
                format!("classes `{prev}` and `{}` both map to `{path}`", class.name),
            ));
            continue;
        }
        let props = model
            .all_properties(&class.name)
            .map_err(|e| vec![Diagnostic::error(Code::UnknownClass, e.to_string())])?;
        let mut taken: HashMap<&str, ()> = props.iter().map(|p| (p.name.as_str(), ())).collect();
        let mut ends = Vec::new();
        for (assoc, to) in model.navigable_ends(&class.name) {
            let end = &assoc.ends[to];
            let name = end.navigation_name();
            if taken.insert(name, ()).is_some() {
                errors.push(Diagnostic::error(
                    Code::GenUnsupported,
                    format!(
                        "association `{}`: end `{name}` clashes with another member of class `{}`",
                        assoc.name, class.name
                    ),
                ));
                continue;
            }
            let ty = if end.multiplicity.is_single() {
                format!("\"{} | None\"", end.target_class)
            } else {
                format!("\"list[{}]\"", end.target_class)
            };
            ends.push(format!("{name}: {ty}"));
        }

        let mut w = CodeWriter::default();
        let bases: Vec<&str> = model.generals_of(&class.name).collect();
        if bases.is_empty() {
            w.line(&format!("class {}:", class.name));
        } else {
            w.line(&format!("class {}({}):", class.name, bases.join(", ")));
        }
        w.indent();
        for e in &ends {
            w.line(e);
        }
        if !ends.is_empty() {
            w.blank();
        }
        let params: Vec<&str> = props.iter().map(|p| p.name.as_str()).collect();
        if params.is_empty() {
            w.line("def __init__(self):");
            w.indent().line("pass").dedent();
        } else {
            w.line(&format!("def __init__(self, {}):", params.join(", ")));
            w.indent();
            for p in &params {
                w.line(&format!("self.{p} = {p}"));
            }
            w.dedent();
        }
        artifacts.push(GeneratedArtifact::new(path, w.finish()));
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    Ok(GenOutput {
        artifacts,
        diagnostics: Vec::new(),
    })
}
