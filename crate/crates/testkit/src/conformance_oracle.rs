//! Brute-force conformance: the multiset of violation codes, computed by
//! quadratic scans over the raw declarations.

use buml::model::{ClassModel, ObjectModel, PrimitiveType, TypeRef, Value};
use buml::Code;

fn class_exists(m: &ClassModel, c: &str) -> bool {
    m.classes.iter().any(|k| k.name == c)
}

fn is_a(m: &ClassModel, class: &str, sup: &str) -> bool {
    if !class_exists(m, class) || !class_exists(m, sup) {
        return false;
    }
    let mut frontier = vec![class.to_string()];
    let mut seen: Vec<String> = Vec::new();
    while let Some(c) = frontier.pop() {
        if c == sup {
            return true;
        }
        if seen.contains(&c) {
            continue;
        }
        for g in m.generalizations.iter().filter(|g| g.specific == c) {
            frontier.push(g.general.clone());
        }
        seen.push(c);
    }
    false
}

/// Property names and types visible on `class`, inherited ones included.
fn props(m: &ClassModel, class: &str) -> Vec<(String, TypeRef)> {
    m.classes
        .iter()
        .filter(|c| is_a(m, class, &c.name))
        .flat_map(|c| {
            c.properties
                .iter()
                .map(|p| (p.name.clone(), p.declared_type.clone()))
        })
        .collect()
}

fn fits(m: &ClassModel, om: &ObjectModel, ty: &TypeRef, v: &Value) -> bool {
    if matches!(v, Value::Null) {
        return true;
    }
    match ty {
        TypeRef::Primitive(p) => matches!(
            (p, v),
            (PrimitiveType::Int, Value::Int(_))
                | (PrimitiveType::Float, Value::Int(_) | Value::Float(_))
                | (PrimitiveType::Str, Value::Str(_))
                | (PrimitiveType::Bool, Value::Bool(_))
        ),
        TypeRef::Named(n) => {
            if class_exists(m, n) {
                match v {
                    Value::Str(id) => om
                        .objects
                        .iter()
                        .find(|o| o.id == *id)
                        .is_some_and(|o| is_a(m, &o.classifier, n)),
                    _ => false,
                }
            } else if let Some(e) = m.enumerations.iter().find(|e| e.name == *n) {
                matches!(v, Value::Enum { enumeration, literal } if enumeration == n && e.literals.contains(literal))
            } else {
                false
            }
        }
    }
}

/// Every violation code `check_conformance` should report, sorted.
pub fn conformance_codes(om: &ObjectModel, m: &ClassModel) -> Vec<Code> {
    let mut out = Vec::new();
    for (i, o) in om.objects.iter().enumerate() {
        if om.objects[..i].iter().any(|p| p.id == o.id) {
            out.push(Code::DupObject);
        }
        let Some(class) = m.classes.iter().find(|c| c.name == o.classifier) else {
            out.push(Code::UnknownClassifier);
            continue;
        };
        if class.is_abstract {
            out.push(Code::AbstractInstance);
        }
        let ps = props(m, &o.classifier);
        for (k, s) in o.slots.iter().enumerate() {
            if o.slots[..k]
                .iter()
                .any(|t| t.property_name == s.property_name)
            {
                out.push(Code::DupSlot);
                continue;
            }
            match ps.iter().find(|(n, _)| *n == s.property_name) {
                None => out.push(Code::UnknownProperty),
                Some((_, ty)) if !fits(m, om, ty, &s.value) => out.push(Code::SlotType),
                _ => {}
            }
        }
        for (n, _) in &ps {
            if !o.slots.iter().any(|s| s.property_name == *n) {
                out.push(Code::SlotMissing);
            }
        }
    }
    for (k, l) in om.links.iter().enumerate() {
        let Some(a) = m.associations.iter().find(|a| a.name == l.association_name) else {
            out.push(Code::UnknownAssociation);
            continue;
        };
        let twin = om.links[..k].iter().any(|p| {
            p.association_name == l.association_name && p.end(0) == l.end(0) && p.end(1) == l.end(1)
        });
        if twin {
            out.push(Code::DupLink);
        }
        for i in 0..2 {
            match om.objects.iter().find(|o| o.id == l.end(i)) {
                None => out.push(Code::UnknownObject),
                Some(o) if !is_a(m, &o.classifier, &a.ends[i].target_class) => {
                    out.push(Code::LinkEndType)
                }
                _ => {}
            }
        }
    }
    for a in &m.associations {
        for i in 0..2 {
            let j = 1 - i;
            for o in &om.objects {
                if !is_a(m, &o.classifier, &a.ends[j].target_class) {
                    continue;
                }
                let n = om
                    .links
                    .iter()
                    .filter(|l| l.association_name == a.name && l.end(j) == o.id)
                    .count() as u64;
                let mult = a.ends[i].multiplicity;
                if n < mult.lower as u64 {
                    out.push(Code::MultLower);
                } else if mult.upper.is_some_and(|u| n > u as u64) {
                    out.push(Code::MultUpper);
                }
            }
        }
    }
    out.sort();
    out
}
