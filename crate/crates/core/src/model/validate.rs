//! Well-formedness of class models.

use std::collections::{HashMap, HashSet};

use petgraph::algo::tarjan_scc;
use petgraph::graphmap::DiGraphMap;

use super::class::{ClassModel, ResolvedType};
use crate::diagnostic::{Code, Diagnostic};

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Which declaration a well-formedness diagnostic is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Section {
    Model,
    Enum,
    Class,
    Association,
    Generalization,
}

struct Collector {
    items: Vec<(Section, usize, Diagnostic)>,
}

impl Collector {
    fn push(&mut self, section: Section, index: usize, diag: Diagnostic) {
        self.items.push((section, index, diag));
    }

    fn ident(&mut self, section: Section, index: usize, what: &str, name: &str) {
        if !is_identifier(name) {
            self.push(
                section,
                index,
                Diagnostic::error(
                    Code::InvalidIdentifier,
                    format!("{what} name `{name}` is not an identifier"),
                ),
            );
        }
    }

    fn finish(mut self) -> Vec<(Section, usize, Diagnostic)> {
        // Stable: preserves discovery order among equal (element, code) keys.
        self.items
            .sort_by(|a, b| (a.0, a.1, a.2.code.as_str()).cmp(&(b.0, b.1, b.2.code.as_str())));
        self.items
    }
}

/// Checks every class-model invariant and returns the violations, ordered by
/// declaration (enumerations, classes, associations, generalizations) and
/// then by code. An empty result means the model is well formed.
pub fn validate_class_model(model: &ClassModel) -> Vec<Diagnostic> {
    validate_located(model)
        .into_iter()
        .map(|(_, _, d)| d)
        .collect()
}

pub(crate) fn validate_located(model: &ClassModel) -> Vec<(Section, usize, Diagnostic)> {
    let mut out = Collector { items: Vec::new() };

    if !model.name.is_empty() {
        out.ident(Section::Model, 0, "model", &model.name);
    }

    // Classes and enumerations share the type namespace.
    let mut type_names: HashSet<&str> = HashSet::new();
    for (i, e) in model.enumerations.iter().enumerate() {
        out.ident(Section::Enum, i, "enumeration", &e.name);
        if !type_names.insert(&e.name) {
            out.push(
                Section::Enum,
                i,
                Diagnostic::error(
                    Code::DupName,
                    format!("`{}` is declared more than once", e.name),
                ),
            );
        }
        if e.literals.is_empty() {
            out.push(
                Section::Enum,
                i,
                Diagnostic::error(
                    Code::EnumEmpty,
                    format!("enumeration `{}` has no literals", e.name),
                ),
            );
        }
        let mut seen = HashSet::new();
        for lit in &e.literals {
            out.ident(Section::Enum, i, "literal", lit);
            if !seen.insert(lit.as_str()) {
                out.push(
                    Section::Enum,
                    i,
                    Diagnostic::error(
                        Code::EnumDupLiteral,
                        format!("literal `{lit}` repeats in enumeration `{}`", e.name),
                    ),
                );
            }
        }
    }

    for (i, c) in model.classes.iter().enumerate() {
        out.ident(Section::Class, i, "class", &c.name);
        if !type_names.insert(&c.name) {
            out.push(
                Section::Class,
                i,
                Diagnostic::error(
                    Code::DupName,
                    format!("`{}` is declared more than once", c.name),
                ),
            );
        }
        let mut own = HashSet::new();
        for p in &c.properties {
            out.ident(Section::Class, i, "property", &p.name);
            if !own.insert(p.name.as_str()) {
                out.push(
                    Section::Class,
                    i,
                    Diagnostic::error(
                        Code::DupProperty,
                        format!("property `{}.{}` is declared twice", c.name, p.name),
                    ),
                );
            }
            match model.resolve_type(&p.declared_type) {
                None => out.push(
                    Section::Class,
                    i,
                    Diagnostic::error(
                        Code::UnknownType,
                        format!(
                            "property `{}.{}` has unknown type `{}`",
                            c.name, p.name, p.declared_type
                        ),
                    ),
                ),
                Some(ResolvedType::Primitive(_)) => {}
                Some(_) if p.is_id => out.push(
                    Section::Class,
                    i,
                    Diagnostic::error(
                        Code::IdNonPrimitive,
                        format!(
                            "identifier property `{}.{}` must have a primitive type",
                            c.name, p.name
                        ),
                    ),
                ),
                Some(_) => {}
            }
        }
        for name in inherited_conflicts(model, &c.name) {
            out.push(
                Section::Class,
                i,
                Diagnostic::error(
                    Code::DupProperty,
                    format!(
                        "property `{name}` of class `{}` clashes with an inherited property",
                        c.name
                    ),
                ),
            );
        }
    }

    let mut assoc_names = HashSet::new();
    for (i, a) in model.associations.iter().enumerate() {
        out.ident(Section::Association, i, "association", &a.name);
        if !assoc_names.insert(a.name.as_str()) {
            out.push(
                Section::Association,
                i,
                Diagnostic::error(
                    Code::DupAssociation,
                    format!("association `{}` is declared more than once", a.name),
                ),
            );
        }
        for end in &a.ends {
            if model.class(&end.target_class).is_none() {
                out.push(
                    Section::Association,
                    i,
                    Diagnostic::error(
                        Code::AssocUnknownClass,
                        format!(
                            "association `{}` refers to unknown class `{}`",
                            a.name, end.target_class
                        ),
                    ),
                );
            }
            if let Some(role) = &end.role {
                out.ident(Section::Association, i, "role", role);
            }
            if !end.multiplicity.is_valid() {
                out.push(
                    Section::Association,
                    i,
                    Diagnostic::error(
                        Code::MultInvalid,
                        format!(
                            "association `{}` has invalid multiplicity {}",
                            a.name, end.multiplicity
                        ),
                    ),
                );
            }
        }
        if let (Some(r0), Some(r1)) = (&a.ends[0].role, &a.ends[1].role) {
            if r0 == r1 {
                out.push(
                    Section::Association,
                    i,
                    Diagnostic::error(
                        Code::AssocDupRole,
                        format!("association `{}` uses role `{r0}` on both ends", a.name),
                    ),
                );
            }
        }
        if a.ends[0].is_composite && a.ends[1].is_composite {
            out.push(
                Section::Association,
                i,
                Diagnostic::error(
                    Code::AssocMultiComposite,
                    format!("association `{}` is composite on both ends", a.name),
                ),
            );
        }
    }

    let mut graph: DiGraphMap<&str, ()> = DiGraphMap::new();
    for (i, g) in model.generalizations.iter().enumerate() {
        let mut known = true;
        for name in [&g.general, &g.specific] {
            if model.class(name).is_none() {
                known = false;
                out.push(
                    Section::Generalization,
                    i,
                    Diagnostic::error(
                        Code::GenUnknownClass,
                        format!("generalization refers to unknown class `{name}`"),
                    ),
                );
            }
        }
        if g.general == g.specific {
            out.push(
                Section::Generalization,
                i,
                Diagnostic::error(
                    Code::GenSelf,
                    format!("class `{}` cannot specialize itself", g.general),
                ),
            );
        } else if known {
            graph.add_edge(g.specific.as_str(), g.general.as_str(), ());
        }
    }

    let order: HashMap<&str, usize> = model
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.name.as_str(), i))
        .collect();
    let mut cycles: Vec<Vec<&str>> = tarjan_scc(&graph)
        .into_iter()
        .filter(|scc| scc.len() > 1)
        .map(|mut scc| {
            scc.sort_by_key(|n| order.get(n).copied().unwrap_or(usize::MAX));
            scc
        })
        .collect();
    cycles.sort_by_key(|scc| order.get(scc[0]).copied().unwrap_or(usize::MAX));
    for scc in cycles {
        let at = model
            .generalizations
            .iter()
            .position(|g| scc.contains(&g.general.as_str()) && scc.contains(&g.specific.as_str()))
            .unwrap_or(model.generalizations.len());
        out.push(
            Section::Generalization,
            at,
            Diagnostic::error(
                Code::GenCycle,
                format!("generalization cycle among {}", scc.join(", ")),
            ),
        );
    }

    out.finish()
}

/// Property names duplicated in `all_properties(class)` that are not
/// already duplicated within a single direct superclass (those are reported
/// on the superclass).
fn inherited_conflicts(model: &ClassModel, class: &str) -> Vec<String> {
    fn dups(model: &ClassModel, class: &str) -> Vec<String> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for p in model.all_properties(class).unwrap_or_default() {
            if !seen.insert(p.name.as_str()) && !out.contains(&p.name) {
                out.push(p.name.clone());
            }
        }
        out
    }
    let own_dups: HashSet<&str> = {
        let c = model.class(class).expect("caller passes a declared class");
        let mut seen = HashSet::new();
        c.properties
            .iter()
            .filter(|p| !seen.insert(p.name.as_str()))
            .map(|p| p.name.as_str())
            .collect()
    };
    let inherited: HashSet<String> = model
        .generals_of(class)
        .filter(|g| model.class(g).is_some())
        .flat_map(|g| dups(model, g))
        .collect();
    dups(model, class)
        .into_iter()
        .filter(|n| !inherited.contains(n) && !own_dups.contains(n.as_str()))
        .collect()
}
