//! Conformance of an object model to a class model.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};

use super::class::{ClassModel, ResolvedType, TypeRef};
use super::object::{ObjectDef, ObjectModel, Value};
use super::PrimitiveType;
use crate::diagnostic::{Code, Diagnostic};
use crate::exec::Execution;

/// Whether `value` may be stored in a slot declared with type `ty`.
///
/// `Null` fits everywhere; an int fits a float slot; enum values must name
/// the declared enumeration and one of its literals; class-typed slots hold
/// the id (as a string) of an instance of that class. Everything else must
/// match the primitive exactly.
pub fn value_conforms(
    model: &ClassModel,
    objects: &ObjectModel,
    ty: &TypeRef,
    value: &Value,
) -> bool {
    match (model.resolve_type(ty), value) {
        (_, Value::Null) => true,
        (None, _) => false,
        (Some(ResolvedType::Primitive(p)), v) => matches!(
            (p, v),
            (PrimitiveType::Int, Value::Int(_))
                | (PrimitiveType::Float, Value::Int(_) | Value::Float(_))
                | (PrimitiveType::Str, Value::Str(_))
                | (PrimitiveType::Bool, Value::Bool(_))
        ),
        (
            Some(ResolvedType::Enum(e)),
            Value::Enum {
                enumeration,
                literal,
            },
        ) => *enumeration == e.name && e.has_literal(literal),
        (Some(ResolvedType::Class(c)), Value::Str(id)) => objects
            .object(id)
            .is_some_and(|o| model.conforms_to(&o.classifier, &c.name)),
        _ => false,
    }
}

/// Checks `objects` against `model` and returns every violation.
///
/// Order: per-object findings in object order, then per-link findings in
/// link order, then multiplicity findings by (association, end, object).
pub fn check_conformance(objects: &ObjectModel, model: &ClassModel) -> Vec<Diagnostic> {
    check_conformance_with(objects, model, Execution::default())
}

pub fn check_conformance_with(
    objects: &ObjectModel,
    model: &ClassModel,
    exec: Execution,
) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut first_index: HashMap<&str, usize> = HashMap::new();
    let mut duplicate = vec![false; objects.objects.len()];
    for (i, o) in objects.objects.iter().enumerate() {
        match first_index.entry(&o.id) {
            Entry::Occupied(_) => duplicate[i] = true,
            Entry::Vacant(v) => {
                v.insert(i);
            }
        }
    }

    let per_object = exec.map_range(objects.objects.len(), |i| {
        let o = &objects.objects[i];
        let mut diags = Vec::new();
        if duplicate[i] {
            diags.push(Diagnostic::error(
                Code::DupObject,
                format!("object `{}` is declared more than once", o.id),
            ));
        }
        check_object(o, objects, model, &mut diags);
        diags
    });
    out.extend(per_object.into_iter().flatten());

    let mut seen_links = HashSet::new();
    for (k, link) in objects.links.iter().enumerate() {
        let subject = format!("link #{} `{}` -- `{}`", k + 1, link.end(0), link.end(1));
        let Some(assoc) = model.association(&link.association_name) else {
            out.push(Diagnostic::error(
                Code::UnknownAssociation,
                format!("{subject}: unknown association `{}`", link.association_name),
            ));
            continue;
        };
        if !seen_links.insert((link.association_name.as_str(), link.end(0), link.end(1))) {
            out.push(Diagnostic::error(
                Code::DupLink,
                format!("{subject}: duplicate link of `{}`", assoc.name),
            ));
        }
        for i in 0..2 {
            let id = link.end(i);
            match first_index.get(id) {
                None => out.push(Diagnostic::error(
                    Code::UnknownObject,
                    format!("{subject}: unknown object `{id}`"),
                )),
                Some(&idx) => {
                    let o = &objects.objects[idx];
                    let target = &assoc.ends[i].target_class;
                    if !model.conforms_to(&o.classifier, target) {
                        out.push(Diagnostic::error(
                            Code::LinkEndType,
                            format!(
                                "{subject}: end {} of `{}` expects `{target}`, `{id}` is a `{}`",
                                i + 1,
                                assoc.name,
                                o.classifier
                            ),
                        ));
                    }
                }
            }
        }
    }

    out.extend(multiplicity_violations(objects, model, exec));
    out
}

fn check_object(
    o: &ObjectDef,
    objects: &ObjectModel,
    model: &ClassModel,
    out: &mut Vec<Diagnostic>,
) {
    let Some(class) = model.class(&o.classifier) else {
        out.push(Diagnostic::error(
            Code::UnknownClassifier,
            format!("object `{}`: unknown class `{}`", o.id, o.classifier),
        ));
        return;
    };
    if class.is_abstract {
        out.push(Diagnostic::error(
            Code::AbstractInstance,
            format!("object `{}`: class `{}` is abstract", o.id, o.classifier),
        ));
    }
    let props = model.all_properties(&class.name).unwrap_or_default();
    let mut seen = HashSet::new();
    for slot in &o.slots {
        if !seen.insert(slot.property_name.as_str()) {
            out.push(Diagnostic::error(
                Code::DupSlot,
                format!(
                    "object `{}`: slot `{}` is set more than once",
                    o.id, slot.property_name
                ),
            ));
            continue;
        }
        match props.iter().find(|p| p.name == slot.property_name) {
            None => out.push(Diagnostic::error(
                Code::UnknownProperty,
                format!(
                    "object `{}`: class `{}` has no property `{}`",
                    o.id, class.name, slot.property_name
                ),
            )),
            Some(p) if !value_conforms(model, objects, &p.declared_type, &slot.value) => {
                out.push(Diagnostic::error(
                    Code::SlotType,
                    format!(
                        "object `{}`: slot `{}` expects `{}`, got {}",
                        o.id, p.name, p.declared_type, slot.value
                    ),
                ))
            }
            Some(_) => {}
        }
    }
    for p in props {
        if !seen.contains(p.name.as_str()) {
            out.push(Diagnostic::error(
                Code::SlotMissing,
                format!("object `{}`: no slot for property `{}`", o.id, p.name),
            ));
        }
    }
}

/// For association end `i`, every object conforming to the opposite end's
/// class must be linked to a number of end-`i` objects within end `i`'s
/// multiplicity. Every link of the association counts, valid or not.
fn multiplicity_violations(
    objects: &ObjectModel,
    model: &ClassModel,
    exec: Execution,
) -> Vec<Diagnostic> {
    let mut counts: HashMap<(&str, usize, &str), usize> = HashMap::new();
    for link in &objects.links {
        for j in 0..2 {
            *counts
                .entry((link.association_name.as_str(), j, link.end(j)))
                .or_default() += 1;
        }
    }
    let per_assoc = exec.map(&model.associations, |assoc| {
        let mut diags = Vec::new();
        for (i, end) in assoc.ends.iter().enumerate() {
            let j = 1 - i;
            let source = &assoc.ends[j].target_class;
            for o in &objects.objects {
                if !model.conforms_to(&o.classifier, source) {
                    continue;
                }
                let n = counts
                    .get(&(assoc.name.as_str(), j, o.id.as_str()))
                    .copied()
                    .unwrap_or(0);
                let m = end.multiplicity;
                if (n as u64) < m.lower as u64 {
                    diags.push(Diagnostic::error(
                        Code::MultLower,
                        format!(
                            "object `{}`: {n} `{}` link(s) via `{}`, at least {} required",
                            o.id,
                            end.navigation_name(),
                            assoc.name,
                            m.lower
                        ),
                    ));
                } else if !m.admits(n) {
                    diags.push(Diagnostic::error(
                        Code::MultUpper,
                        format!(
                            "object `{}`: {n} `{}` link(s) via `{}`, at most {} allowed",
                            o.id,
                            end.navigation_name(),
                            assoc.name,
                            m.upper.unwrap_or(0)
                        ),
                    ));
                }
            }
        }
        diags
    });
    per_assoc.into_iter().flatten().collect()
}
