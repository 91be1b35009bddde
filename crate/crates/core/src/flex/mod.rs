//! Flexible modeling: derive a class model from an object population, or
//! prune a population until it conforms to a given class model.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::diagnostic::{Code, Diagnostic};
use crate::model::{
    check_conformance, value_conforms, Association, AssociationEnd, ClassDef, ClassModel, EnumDef,
    Link, Multiplicity, ObjectDef, ObjectModel, PrimitiveType, TypeRef, Value,
};

/// Observed kinds of one slot name in one class.
#[derive(Debug, Default, Clone)]
struct Kinds {
    int: bool,
    float: bool,
    boolean: bool,
    string: bool,
    /// Enumeration names seen, in first-seen order.
    enums: Vec<String>,
}

impl Kinds {
    fn observe(&mut self, v: &Value) {
        match v {
            Value::Int(_) => self.int = true,
            Value::Float(_) => self.float = true,
            Value::Bool(_) => self.boolean = true,
            Value::Str(_) => self.string = true,
            Value::Enum { enumeration, .. } => {
                if !self.enums.contains(enumeration) {
                    self.enums.push(enumeration.clone());
                }
            }
            Value::Null => {}
        }
    }

    /// Least upper bound, and whether it is lossy (some observed value does
    /// not conform to it).
    fn lub(&self) -> (TypeRef, bool) {
        let numeric = self.int || self.float;
        let groups = [numeric, self.boolean, self.string, !self.enums.is_empty()]
            .iter()
            .filter(|b| **b)
            .count();
        match groups {
            0 => (PrimitiveType::Str.into(), false),
            1 if self.float => (PrimitiveType::Float.into(), false),
            1 if self.int => (PrimitiveType::Int.into(), false),
            1 if self.boolean => (PrimitiveType::Bool.into(), false),
            1 if self.string => (PrimitiveType::Str.into(), false),
            1 if self.enums.len() == 1 => (TypeRef::named(self.enums[0].clone()), false),
            _ => (PrimitiveType::Str.into(), true),
        }
    }

    fn all_null(&self) -> bool {
        !(self.int || self.float || self.boolean || self.string) && self.enums.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inference {
    pub model: ClassModel,
    /// Warnings. The model accepts its source population exactly when none
    /// of them is `infer-lossy-type` or `infer-partial-slot`.
    pub diagnostics: Vec<Diagnostic>,
}

/// Infers a class model from `objects`.
///
/// One class per classifier and one property per slot name, typed by the
/// least upper bound of the observed values: int below float, every kind
/// below str, null compatible with all. One association per link
/// association name; each end takes the classifier seen there and a
/// multiplicity spanning the observed link counts (`*` once above one).
/// An end seen with several classifiers is typed by a new abstract class
/// that all of them specialize; otherwise the model is flat.
pub fn infer_class_model(objects: &ObjectModel) -> Inference {
    let mut diags = Vec::new();
    let mut class_order: Vec<&str> = Vec::new();
    let mut slots: HashMap<&str, Vec<(&str, Kinds)>> = HashMap::new();
    let mut enum_literals: Vec<(String, Vec<String>)> = Vec::new();

    let mut seen_ids = HashSet::new();
    let unique: Vec<&ObjectDef> = objects
        .objects
        .iter()
        .filter(|o| seen_ids.insert(o.id.as_str()))
        .collect();

    for o in &unique {
        let cls = o.classifier.as_str();
        if !slots.contains_key(cls) {
            class_order.push(cls);
            slots.insert(cls, Vec::new());
        }
        let props = slots.get_mut(cls).expect("inserted above");
        let mut seen_here = HashSet::new();
        for s in &o.slots {
            if !seen_here.insert(s.property_name.as_str()) {
                continue;
            }
            let idx = match props.iter().position(|(n, _)| *n == s.property_name) {
                Some(i) => i,
                None => {
                    props.push((&s.property_name, Kinds::default()));
                    props.len() - 1
                }
            };
            props[idx].1.observe(&s.value);
            if let Value::Enum {
                enumeration,
                literal,
            } = &s.value
            {
                match enum_literals.iter_mut().find(|(n, _)| n == enumeration) {
                    Some((_, lits)) if !lits.contains(literal) => lits.push(literal.clone()),
                    Some(_) => {}
                    None => enum_literals.push((enumeration.clone(), vec![literal.clone()])),
                }
            }
        }
    }

    let mut model = ClassModel::new(objects.name.clone());
    for (name, lits) in &enum_literals {
        model = model.with_enum(EnumDef::new(name.clone(), lits.iter().cloned()));
    }
    for cls in &class_order {
        let mut class = ClassDef::new(*cls);
        for (pname, kinds) in &slots[cls] {
            let (ty, lossy) = kinds.lub();
            if kinds.all_null() {
                diags.push(Diagnostic::warning(
                    Code::InferAllNull,
                    format!("`{cls}.{pname}` is null everywhere; typed as str"),
                ));
            }
            if lossy {
                diags.push(Diagnostic::warning(
                    Code::InferLossyType,
                    format!("`{cls}.{pname}` mixes incompatible kinds; typed as str, some values will not conform"),
                ));
            }
            class = class.attr(pname, ty);
        }
        model = model.with_class(class);
    }
    // Partial slots: some instance lacks a property its class received.
    for o in &unique {
        for (pname, _) in &slots[o.classifier.as_str()] {
            if o.slot(pname).is_none() {
                diags.push(Diagnostic::warning(
                    Code::InferPartialSlot,
                    format!("object `{}` has no slot `{pname}`", o.id),
                ));
            }
        }
    }

    let classifier: HashMap<&str, &str> = unique
        .iter()
        .map(|o| (o.id.as_str(), o.classifier.as_str()))
        .collect();
    let mut assoc_order: Vec<&str> = Vec::new();
    let mut assoc_links: HashMap<&str, Vec<&Link>> = HashMap::new();
    for l in &objects.links {
        let name = l.association_name.as_str();
        if !assoc_links.contains_key(name) {
            assoc_order.push(name);
        }
        assoc_links.entry(name).or_default().push(l);
    }
    // Abstract supertypes introduced for ends seen with several classes,
    // keyed by the class set in first-seen order.
    let mut supertypes: Vec<(Vec<&str>, String)> = Vec::new();
    for name in assoc_order {
        let links = &assoc_links[name];
        let mut end_classes: [Vec<&str>; 2] = [Vec::new(), Vec::new()];
        for (i, seen) in end_classes.iter_mut().enumerate() {
            for l in links {
                if let Some(c) = classifier.get(l.end(i)) {
                    if !seen.contains(c) {
                        seen.push(c);
                    }
                }
            }
        }
        if end_classes.iter().any(|s| s.is_empty()) {
            continue;
        }
        let mut end_type = [String::new(), String::new()];
        for i in 0..2 {
            let seen = &end_classes[i];
            if seen.len() == 1 {
                end_type[i] = seen[0].to_string();
                continue;
            }
            let existing = supertypes
                .iter()
                .find(|(set, _)| set == seen)
                .map(|(_, n)| n.clone());
            let general = match existing {
                Some(n) => n,
                None => {
                    let n = fresh_name(&model, &seen.join("Or"));
                    model = model.with_class(ClassDef::new(n.clone()).abstract_class());
                    for c in seen {
                        model = model.with_generalization(&n, c);
                    }
                    supertypes.push((seen.clone(), n.clone()));
                    n
                }
            };
            diags.push(Diagnostic::warning(
                Code::InferHeterogeneousEnd,
                format!(
                    "association `{name}` end {} links objects of classes {}; typed by abstract `{general}`",
                    i + 1,
                    seen.join(", "),
                ),
            ));
            end_type[i] = general;
        }
        // Multiplicity of end i: links per instance of the opposite end's classes.
        let mult = |i: usize| {
            let from = &end_classes[1 - i];
            let mut counts: HashMap<&str, u32> = HashMap::new();
            for l in links {
                *counts.entry(l.end(1 - i)).or_default() += 1;
            }
            let per_instance: Vec<u32> = unique
                .iter()
                .filter(|o| from.contains(&o.classifier.as_str()))
                .map(|o| counts.get(o.id.as_str()).copied().unwrap_or(0))
                .collect();
            let lower = per_instance.iter().copied().min().unwrap_or(0);
            let max = per_instance.iter().copied().max().unwrap_or(0);
            Multiplicity {
                lower,
                upper: if max > 1 { None } else { Some(1) },
            }
        };
        let [t0, t1] = end_type;
        model = model.with_association(Association::new(
            name,
            AssociationEnd::new(t0, mult(0)),
            AssociationEnd::new(t1, mult(1)),
        ));
    }
    Inference {
        model,
        diagnostics: diags,
    }
}

/// `base`, or `base` followed by the smallest number that names neither a
/// class nor an enumeration of `model`.
fn fresh_name(model: &ClassModel, base: &str) -> String {
    let taken = |n: &str| model.class(n).is_some() || model.enumeration(n).is_some();
    if !taken(base) {
        return base.to_string();
    }
    (2..)
        .map(|k| format!("{base}{k}"))
        .find(|n| !taken(n))
        .expect("unbounded")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Enforcement {
    pub objects: ObjectModel,
    /// One entry per removed object, slot or link, in removal order.
    pub removed: Vec<Diagnostic>,
    /// Violations left in the result; only `mult-lower` by construction.
    pub residual: Vec<Diagnostic>,
}

/// Removes non-conforming elements until the population conforms to
/// `model`, except for lower-bound violations, which are reported in
/// `residual` rather than resolved.
///
/// Repeats until nothing changes: objects with an unknown or abstract
/// classifier, duplicate ids or a missing slot; slots that are duplicated,
/// unknown or ill-typed; links with an unknown association, a missing or
/// ill-typed end, or that duplicate an earlier link. Then one pass in
/// declaration order drops every link that would exceed an upper bound,
/// so the earliest links are kept.
pub fn enforce_conformance(objects: &ObjectModel, model: &ClassModel) -> Enforcement {
    let mut out = objects.clone();
    let mut removed = Vec::new();
    loop {
        let before = removed.len();
        prune_slots(&mut out, model, &mut removed);
        prune_objects(&mut out, model, &mut removed);
        prune_links(&mut out, model, &mut removed);
        if removed.len() == before {
            break;
        }
    }
    prune_upper_bounds(&mut out, model, &mut removed);
    let residual = check_conformance(&out, model);
    Enforcement {
        objects: out,
        removed,
        residual,
    }
}

fn prune_slots(out: &mut ObjectModel, model: &ClassModel, removed: &mut Vec<Diagnostic>) {
    let snapshot = out.clone();
    for o in &mut out.objects {
        let Some(props) = model
            .class(&o.classifier)
            .and_then(|c| model.all_properties(&c.name).ok())
        else {
            continue;
        };
        let mut seen = HashSet::new();
        let id = o.id.clone();
        o.slots.retain(|s| {
            let verdict = if !seen.insert(s.property_name.clone()) {
                Some((Code::DupSlot, "duplicate slot"))
            } else {
                match props.iter().find(|p| p.name == s.property_name) {
                    None => Some((Code::UnknownProperty, "unknown property")),
                    Some(p) if !value_conforms(model, &snapshot, &p.declared_type, &s.value) => {
                        Some((Code::SlotType, "ill-typed value"))
                    }
                    Some(_) => None,
                }
            };
            match verdict {
                Some((code, why)) => {
                    removed.push(Diagnostic::error(
                        code,
                        format!(
                            "removed slot `{id}.{}` = {}: {why}",
                            s.property_name, s.value
                        ),
                    ));
                    false
                }
                None => true,
            }
        });
    }
}

fn prune_objects(out: &mut ObjectModel, model: &ClassModel, removed: &mut Vec<Diagnostic>) {
    let mut seen = HashSet::new();
    out.objects.retain(|o| {
        let verdict = if !seen.insert(o.id.clone()) {
            Some((Code::DupObject, "duplicate id".to_string()))
        } else {
            match model.class(&o.classifier) {
                None => Some((
                    Code::UnknownClassifier,
                    format!("unknown class `{}`", o.classifier),
                )),
                Some(c) if c.is_abstract => Some((
                    Code::AbstractInstance,
                    format!("class `{}` is abstract", c.name),
                )),
                Some(c) => model
                    .all_properties(&c.name)
                    .unwrap_or_default()
                    .iter()
                    .find(|p| o.slot(&p.name).is_none())
                    .map(|p| (Code::SlotMissing, format!("no value for `{}`", p.name))),
            }
        };
        match verdict {
            Some((code, why)) => {
                removed.push(Diagnostic::error(
                    code,
                    format!("removed object `{}`: {why}", o.id),
                ));
                false
            }
            None => true,
        }
    });
}

fn prune_links(out: &mut ObjectModel, model: &ClassModel, removed: &mut Vec<Diagnostic>) {
    let classifier: HashMap<String, String> = out
        .objects
        .iter()
        .map(|o| (o.id.clone(), o.classifier.clone()))
        .collect();
    let mut seen: HashSet<(String, String, String)> = HashSet::new();
    out.links.retain(|l| {
        let subject = format!(
            "removed link `{}` -- `{}` ({})",
            l.end(0),
            l.end(1),
            l.association_name
        );
        let verdict = match model.association(&l.association_name) {
            None => Some((Code::UnknownAssociation, "unknown association".to_string())),
            Some(a) => (0..2)
                .find_map(|i| match classifier.get(l.end(i)) {
                    None => Some((
                        Code::UnknownObject,
                        format!("object `{}` does not exist", l.end(i)),
                    )),
                    Some(c) if !model.conforms_to(c, &a.ends[i].target_class) => Some((
                        Code::LinkEndType,
                        format!("`{}` is not a `{}`", l.end(i), a.ends[i].target_class),
                    )),
                    Some(_) => None,
                })
                .or_else(|| {
                    let key = (
                        l.association_name.clone(),
                        l.end(0).to_string(),
                        l.end(1).to_string(),
                    );
                    (!seen.insert(key)).then(|| (Code::DupLink, "duplicate link".to_string()))
                }),
        };
        match verdict {
            Some((code, why)) => {
                removed.push(Diagnostic::error(code, format!("{subject}: {why}")));
                false
            }
            None => true,
        }
    });
}

fn prune_upper_bounds(out: &mut ObjectModel, model: &ClassModel, removed: &mut Vec<Diagnostic>) {
    // (association, position j, object at j) -> links kept so far. Counts
    // against the upper bound of the opposite end.
    let mut counts: HashMap<(String, usize, String), u32> = HashMap::new();
    out.links.retain(|l| {
        let Some(a) = model.association(&l.association_name) else {
            return true;
        };
        let over = (0..2).find(|&j| {
            let key = (l.association_name.clone(), j, l.end(j).to_string());
            let n = counts.get(&key).copied().unwrap_or(0);
            a.ends[1 - j].multiplicity.upper.is_some_and(|u| n + 1 > u)
        });
        if let Some(j) = over {
            removed.push(Diagnostic::error(
                Code::MultUpper,
                format!(
                    "removed link `{}` -- `{}` ({}): `{}` is at the upper bound of `{}` ({})",
                    l.end(0),
                    l.end(1),
                    l.association_name,
                    l.end(j),
                    a.ends[1 - j].navigation_name(),
                    a.ends[1 - j].multiplicity
                ),
            ));
            return false;
        }
        for j in 0..2 {
            *counts
                .entry((l.association_name.clone(), j, l.end(j).to_string()))
                .or_default() += 1;
        }
        true
    });
}

/// Element sets of a population, used to check that pruning only removes.
pub fn element_sets(
    objects: &ObjectModel,
) -> (BTreeSet<String>, BTreeSet<String>, BTreeSet<String>) {
    let objs = objects
        .objects
        .iter()
        .map(|o| format!("{}:{}", o.id, o.classifier))
        .collect();
    let slots = objects
        .objects
        .iter()
        .flat_map(|o| {
            o.slots
                .iter()
                .map(move |s| format!("{}.{}={}", o.id, s.property_name, s.value))
        })
        .collect();
    let links = objects
        .links
        .iter()
        .map(|l| format!("{}:{}--{}", l.association_name, l.end(0), l.end(1)))
        .collect();
    (objs, slots, links)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostic::has_errors;
    use crate::model::validate_class_model;

    fn passport(id: &str, code: Value) -> ObjectDef {
        ObjectDef::new(id, "ProductPassport").with_slot("code", code)
    }

    #[test]
    fn single_rule_inference() {
        let o = ObjectModel::new("o").with_object(passport("p1", Value::str("X")));
        let inf = infer_class_model(&o);
        let c = inf.model.class("ProductPassport").unwrap();
        assert_eq!(
            c.properties[0].declared_type,
            TypeRef::Primitive(PrimitiveType::Str)
        );
        assert!(inf.diagnostics.is_empty());
        assert_eq!(
            infer_class_model(&ObjectModel::new("")).model,
            ClassModel::new("")
        );
    }

    #[test]
    fn lub_table() {
        let cases: Vec<(Vec<Value>, TypeRef, Option<Code>)> = vec![
            (
                vec![Value::Int(1), Value::Float(2.5)],
                PrimitiveType::Float.into(),
                None,
            ),
            (
                vec![Value::Int(1), Value::Null],
                PrimitiveType::Int.into(),
                None,
            ),
            (
                vec![Value::Null, Value::Null],
                PrimitiveType::Str.into(),
                Some(Code::InferAllNull),
            ),
            (
                vec![Value::Bool(true), Value::Int(1)],
                PrimitiveType::Str.into(),
                Some(Code::InferLossyType),
            ),
            (
                vec![Value::enum_literal("E", "A"), Value::enum_literal("E", "B")],
                TypeRef::named("E"),
                None,
            ),
            (
                vec![Value::enum_literal("E", "A"), Value::str("A")],
                PrimitiveType::Str.into(),
                Some(Code::InferLossyType),
            ),
        ];
        for (values, ty, warning) in cases {
            let mut o = ObjectModel::new("o");
            for (i, v) in values.iter().enumerate() {
                o = o.with_object(ObjectDef::new(format!("o{i}"), "C").with_slot("a", v.clone()));
            }
            let inf = infer_class_model(&o);
            assert_eq!(
                inf.model.class("C").unwrap().properties[0].declared_type,
                ty,
                "{values:?}"
            );
            assert_eq!(
                inf.diagnostics.first().map(|d| d.code),
                warning,
                "{values:?}"
            );
            assert!(!has_errors(&validate_class_model(&inf.model)));
            assert_eq!(
                check_conformance(&o, &inf.model).is_empty(),
                warning != Some(Code::InferLossyType)
            );
        }
    }

    #[test]
    fn associations_take_observed_bounds() {
        let o = ObjectModel::new("o")
            .with_object(passport("p1", Value::str("a")))
            .with_object(passport("p2", Value::str("b")))
            .with_object(ObjectDef::new("s1", "Stage"))
            .with_object(ObjectDef::new("s2", "Stage"))
            .with_link(Link::new("stages", "p1", "s1"))
            .with_link(Link::new("stages", "p1", "s2"));
        let inf = infer_class_model(&o);
        let a = inf.model.association("stages").unwrap();
        assert_eq!(a.ends[0].multiplicity, Multiplicity::ONE);
        assert_eq!(a.ends[1].multiplicity, Multiplicity::MANY);
        assert!(check_conformance(&o, &inf.model).is_empty());
    }

    fn dpp_model() -> ClassModel {
        ClassModel::new("m")
            .with_class(ClassDef::new("ProductPassport").id_attr("code", PrimitiveType::Str))
            .with_class(ClassDef::new("Stage"))
            .with_association(Association::new(
                "stages",
                AssociationEnd::new("ProductPassport", Multiplicity::OPTIONAL),
                AssociationEnd::new(
                    "Stage",
                    Multiplicity {
                        lower: 0,
                        upper: Some(2),
                    },
                ),
            ))
    }

    #[test]
    fn conformant_input_is_a_fixpoint() {
        let o = ObjectModel::new("o")
            .with_object(passport("p1", Value::str("a")))
            .with_object(ObjectDef::new("s1", "Stage"))
            .with_link(Link::new("stages", "p1", "s1"));
        let e = enforce_conformance(&o, &dpp_model());
        assert_eq!(e.objects, o);
        assert!(e.removed.is_empty() && e.residual.is_empty());
    }

    #[test]
    fn unknown_objects_cascade_to_links() {
        let o = ObjectModel::new("o")
            .with_object(passport("p1", Value::str("a")))
            .with_object(ObjectDef::new("g", "Ghost"))
            .with_link(Link::new("stages", "p1", "g"));
        let e = enforce_conformance(&o, &dpp_model());
        let codes: Vec<_> = e.removed.iter().map(|d| d.code).collect();
        assert_eq!(codes, vec![Code::UnknownClassifier, Code::UnknownObject]);
        assert_eq!(e.objects.objects.len(), 1);
        assert!(e.objects.links.is_empty());
    }

    #[test]
    fn newest_link_over_upper_bound_goes() {
        let o = ObjectModel::new("o")
            .with_object(passport("p1", Value::str("a")))
            .with_object(ObjectDef::new("s1", "Stage"))
            .with_object(ObjectDef::new("s2", "Stage"))
            .with_object(ObjectDef::new("s3", "Stage"))
            .with_link(Link::new("stages", "p1", "s1"))
            .with_link(Link::new("stages", "p1", "s2"))
            .with_link(Link::new("stages", "p1", "s3"));
        let e = enforce_conformance(&o, &dpp_model());
        assert_eq!(e.removed.len(), 1);
        assert_eq!(e.removed[0].code, Code::MultUpper);
        assert_eq!(e.objects.links, o.links[..2].to_vec());
        let again = enforce_conformance(&e.objects, &dpp_model());
        assert_eq!(again.objects, e.objects);
        assert!(again.removed.is_empty());
    }

    #[test]
    fn lower_bounds_are_residual() {
        let m = dpp_model().with_association(Association::new(
            "owner",
            AssociationEnd::new("ProductPassport", Multiplicity::ONE),
            AssociationEnd::new("Stage", Multiplicity::MANY).role("owned"),
        ));
        let o = ObjectModel::new("o").with_object(ObjectDef::new("s1", "Stage"));
        let e = enforce_conformance(&o, &m);
        assert!(e.removed.is_empty());
        assert_eq!(
            e.residual.iter().map(|d| d.code).collect::<Vec<_>>(),
            vec![Code::MultLower]
        );
    }

    #[test]
    fn bad_slot_removal_cascades_to_object() {
        let o = ObjectModel::new("o").with_object(passport("p1", Value::Int(3)));
        let e = enforce_conformance(&o, &dpp_model());
        let codes: Vec<_> = e.removed.iter().map(|d| d.code).collect();
        assert_eq!(codes, vec![Code::SlotType, Code::SlotMissing]);
        assert!(e.objects.objects.is_empty());
    }
}
