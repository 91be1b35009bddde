//! Object models.
//!
//! ```text
//! objects := "@startobjects" [ID] NL line* "@endobjects"
//! line    := "object" ID ":" ID
//!          | ID "." ID "=" value
//!          | "link" ID "--" ID ":" ID
//! value   := INT | FLOAT | STRING | "true" | "false" | "null" | ID "::" ID | ID
//! ```
//!
//! A bare identifier value is read as a literal of the slot's enumeration
//! type, which needs the class model. Slots must follow their object's
//! declaration; links may refer to objects declared later.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::class_syntax::Cursor;
use super::lexer::{lex_lines, Tok};
use super::ParseResult;
use crate::diagnostic::{has_errors, Code, Diagnostic, SourceSpan};
use crate::model::{AttributeLink, ClassModel, Link, ObjectDef, ObjectModel, ResolvedType, Value};

enum RawValue {
    Value(Value),
    Bare(String),
}

/// Reads one literal value. Shared with the scenario syntax.
pub(crate) fn literal_value(cur: &mut Cursor<'_>) -> Option<Result<Value, String>> {
    match read_value(cur)? {
        RawValue::Value(v) => Some(Ok(v)),
        RawValue::Bare(name) => Some(Err(name)),
    }
}

fn read_value(cur: &mut Cursor<'_>) -> Option<RawValue> {
    let tok = cur.peek()?;
    let value = match tok {
        Tok::Int(i) => RawValue::Value(Value::Int(*i)),
        Tok::Float(x) => RawValue::Value(Value::Float(*x)),
        Tok::Str(s) => RawValue::Value(Value::Str(s.clone())),
        Tok::Ident(id) => match id.as_str() {
            "true" => RawValue::Value(Value::Bool(true)),
            "false" => RawValue::Value(Value::Bool(false)),
            "null" => RawValue::Value(Value::Null),
            _ => {
                if cur.peek_at(1) == Some(&Tok::ColonColon) {
                    if let Some(Tok::Ident(lit)) = cur.peek_at(2) {
                        cur.pos += 3;
                        return Some(RawValue::Value(Value::enum_literal(
                            id.clone(),
                            lit.clone(),
                        )));
                    }
                    return None;
                }
                RawValue::Bare(id.clone())
            }
        },
        _ => return None,
    };
    cur.pos += 1;
    Some(value)
}

/// Parses an object model, resolving bare enumeration literals against
/// `model`. Classifiers are not checked here; see
/// [`crate::model::check_conformance`].
pub fn parse_object_model(text: &str, model: &ClassModel) -> ParseResult<ObjectModel> {
    parse_object_model_file("<input>", text, Some(model))
}

/// Parses an object model without a class model. Bare identifier values are
/// then rejected.
pub fn parse_object_model_standalone(text: &str) -> ParseResult<ObjectModel> {
    parse_object_model_file("<input>", text, None)
}

pub fn parse_object_model_file(
    file: &str,
    text: &str,
    model: Option<&ClassModel>,
) -> ParseResult<ObjectModel> {
    let (lines, lex_errors) = lex_lines(text);
    let mut diags: Vec<Diagnostic> = lex_errors
        .into_iter()
        .map(|e| {
            Diagnostic::error(Code::Syntax, e.message).at(SourceSpan::new(file, e.line, e.col))
        })
        .collect();
    let span = |line, col| SourceSpan::new(file, line, col);
    let syntax = |cur: &Cursor<'_>, expected: &str| {
        Diagnostic::error(
            Code::Syntax,
            format!("expected {expected}, found {}", cur.found()),
        )
        .at(SourceSpan::new(file, cur.line, cur.col()))
    };

    let mut objects = ObjectModel::default();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut pending_links: Vec<(Link, usize, [usize; 2])> = Vec::new();

    let mut iter = lines.iter();
    match iter.next() {
        Some(line) if line.tokens[0].tok == Tok::Directive("startobjects".into()) => {
            let mut cur = Cursor::new(line);
            cur.next();
            if let Some(name) = cur.ident() {
                objects.name = name.to_string();
            }
            if !cur.at_end() {
                diags.push(syntax(&cur, "end of line"));
            }
        }
        Some(line) => diags.push(syntax(&Cursor::new(line), "`@startobjects`")),
        None => diags.push(
            Diagnostic::error(Code::Syntax, "expected `@startobjects`, found end of input")
                .at(span(1, 1)),
        ),
    }

    let mut ended = false;
    let last_line = lines.last().map_or(1, |l| l.number);
    for line in iter {
        let mut cur = Cursor::new(line);
        if ended {
            diags.push(syntax(&cur, "end of input after `@endobjects`"));
            break;
        }
        match cur.peek() {
            Some(Tok::Directive(d)) if d == "endobjects" => {
                cur.next();
                if !cur.at_end() {
                    diags.push(syntax(&cur, "end of line"));
                }
                ended = true;
            }
            Some(Tok::Ident(kw))
                if kw == "object" && matches!(cur.peek_at(1), Some(Tok::Ident(_))) =>
            {
                cur.next();
                let id_col = cur.col();
                let id = cur.ident().expect("peeked");
                if !cur.eat(&Tok::Colon) {
                    diags.push(syntax(&cur, "`:`"));
                    continue;
                }
                let Some(classifier) = cur.ident() else {
                    diags.push(syntax(&cur, "class name"));
                    continue;
                };
                if !cur.at_end() {
                    diags.push(syntax(&cur, "end of line"));
                    continue;
                }
                if index.contains_key(id) {
                    diags.push(
                        Diagnostic::error(
                            Code::DupObject,
                            format!("object `{id}` is declared more than once"),
                        )
                        .at(span(line.number, id_col)),
                    );
                    continue;
                }
                index.insert(id.to_string(), objects.objects.len());
                objects.objects.push(ObjectDef::new(id, classifier));
            }
            Some(Tok::Ident(kw))
                if kw == "link" && matches!(cur.peek_at(1), Some(Tok::Ident(_))) =>
            {
                cur.next();
                let first_col = cur.col();
                let first = cur.ident().expect("peeked");
                match cur.peek() {
                    Some(Tok::Arrow(a)) if a == "--" => {
                        cur.next();
                    }
                    _ => {
                        diags.push(syntax(&cur, "`--`"));
                        continue;
                    }
                }
                let second_col = cur.col();
                let Some(second) = cur.ident() else {
                    diags.push(syntax(&cur, "object id"));
                    continue;
                };
                if !cur.eat(&Tok::Colon) {
                    diags.push(syntax(&cur, "`:` and association name"));
                    continue;
                }
                let Some(assoc) = cur.ident() else {
                    diags.push(syntax(&cur, "association name"));
                    continue;
                };
                if !cur.at_end() {
                    diags.push(syntax(&cur, "end of line"));
                    continue;
                }
                pending_links.push((
                    Link::new(assoc, first, second),
                    line.number,
                    [first_col, second_col],
                ));
            }
            Some(Tok::Ident(_)) => {
                let id_col = cur.col();
                let id = cur.ident().expect("peeked");
                if !cur.eat(&Tok::Dot) {
                    diags.push(syntax(&cur, "`.`"));
                    continue;
                }
                let Some(prop) = cur.ident() else {
                    diags.push(syntax(&cur, "property name"));
                    continue;
                };
                if !cur.eat(&Tok::Eq) {
                    diags.push(syntax(&cur, "`=`"));
                    continue;
                }
                let value_col = cur.col();
                let Some(raw) = read_value(&mut cur) else {
                    diags.push(syntax(&cur, "a value"));
                    continue;
                };
                if !cur.at_end() {
                    diags.push(syntax(&cur, "end of line"));
                    continue;
                }
                let Some(&obj) = index.get(id) else {
                    diags.push(
                        Diagnostic::error(
                            Code::UnknownObject,
                            format!("slot for undeclared object `{id}`"),
                        )
                        .at(span(line.number, id_col)),
                    );
                    continue;
                };
                let value = match raw {
                    RawValue::Value(v) => v,
                    RawValue::Bare(name) => {
                        match resolve_bare(model, &objects.objects[obj].classifier, prop, &name) {
                            Some(v) => v,
                            None => {
                                diags.push(
                                    Diagnostic::error(
                                        Code::Syntax,
                                        format!("`{name}` is not a literal of the type of `{id}.{prop}`"),
                                    )
                                    .at(span(line.number, value_col)),
                                );
                                continue;
                            }
                        }
                    }
                };
                objects.objects[obj].slots.push(AttributeLink {
                    property_name: prop.to_string(),
                    value,
                });
            }
            _ => diags.push(syntax(&cur, "`object`, `link` or a slot assignment")),
        }
    }
    if !ended && !lines.is_empty() {
        diags.push(
            Diagnostic::error(Code::Syntax, "expected `@endobjects` before end of input")
                .at(span(last_line, 1)),
        );
    }

    for (link, line, cols) in pending_links {
        for (i, col) in cols.into_iter().enumerate() {
            if !index.contains_key(link.end(i)) {
                diags.push(
                    Diagnostic::error(
                        Code::UnknownObject,
                        format!("link to undeclared object `{}`", link.end(i)),
                    )
                    .at(span(line, col)),
                );
            }
        }
        objects.links.push(link);
    }

    let model = (!has_errors(&diags)).then_some(objects);
    ParseResult {
        model,
        diagnostics: diags,
    }
}

fn resolve_bare(
    model: Option<&ClassModel>,
    classifier: &str,
    prop: &str,
    name: &str,
) -> Option<Value> {
    let model = model?;
    let props = model.all_properties(classifier).ok()?;
    let p = props.into_iter().find(|p| p.name == prop)?;
    match model.resolve_type(&p.declared_type)? {
        ResolvedType::Enum(e) if e.has_literal(name) => Some(Value::enum_literal(&e.name, name)),
        _ => None,
    }
}

/// Canonical text: each object followed by its slots, then all links.
pub fn serialize_object_model(objects: &ObjectModel) -> String {
    let mut out = String::new();
    if objects.name.is_empty() {
        out.push_str("@startobjects\n");
    } else {
        let _ = writeln!(out, "@startobjects {}", objects.name);
    }
    for o in &objects.objects {
        let _ = writeln!(out, "object {} : {}", o.id, o.classifier);
        for s in &o.slots {
            let _ = writeln!(out, "{}.{} = {}", o.id, s.property_name, s.value);
        }
    }
    for l in &objects.links {
        let _ = writeln!(
            out,
            "link {} -- {} : {}",
            l.end(0),
            l.end(1),
            l.association_name
        );
    }
    out.push_str("@endobjects\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ClassDef, EnumDef, TypeRef};

    fn model() -> ClassModel {
        ClassModel::new("m")
            .with_enum(EnumDef::new("Color", ["RED", "GREEN"]))
            .with_class(ClassDef::new("ProductPassport").attr("color", TypeRef::named("Color")))
    }

    #[test]
    fn one_object_one_slot() {
        let r = parse_object_model(
            "@startobjects\nobject p1 : ProductPassport\np1.code = \"DPP-001\"\n@endobjects",
            &model(),
        );
        assert!(r.diagnostics.is_empty());
        let o = r.model.unwrap();
        assert_eq!(o.objects.len(), 1);
        assert_eq!(o.objects[0].slots.len(), 1);
        assert_eq!(o.objects[0].slot("code"), Some(&Value::str("DPP-001")));
    }

    #[test]
    fn empty_object_model() {
        let r = parse_object_model("@startobjects\n@endobjects", &model());
        assert_eq!(r.model, Some(ObjectModel::default()));
    }

    #[test]
    fn duplicate_object_ids() {
        let r = parse_object_model(
            "@startobjects\nobject p1 : X\nobject p1 : X\n@endobjects",
            &model(),
        );
        assert!(r.model.is_none());
        assert_eq!(r.diagnostics.len(), 1);
        assert_eq!(r.diagnostics[0].code, Code::DupObject);
        assert_eq!(
            r.diagnostics[0].location,
            Some(SourceSpan::new("<input>", 3, 8))
        );
    }

    #[test]
    fn values_and_links() {
        let text = "@startobjects pop\nobject p1 : ProductPassport\np1.color = RED\np1.c2 = Color::GREEN\np1.n = -4\np1.x = 2.5\np1.ok = true\np1.none = null\nlink p1 -- p2 : rel\nobject p2 : ProductPassport\n@endobjects\n";
        let r = parse_object_model(text, &model());
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
        let o = r.model.unwrap();
        assert_eq!(o.name, "pop");
        let p1 = &o.objects[0];
        assert_eq!(p1.slot("color"), Some(&Value::enum_literal("Color", "RED")));
        assert_eq!(p1.slot("c2"), Some(&Value::enum_literal("Color", "GREEN")));
        assert_eq!(p1.slot("n"), Some(&Value::Int(-4)));
        assert_eq!(p1.slot("x"), Some(&Value::Float(2.5)));
        assert_eq!(p1.slot("ok"), Some(&Value::Bool(true)));
        assert_eq!(p1.slot("none"), Some(&Value::Null));
        assert_eq!(o.links, vec![Link::new("rel", "p1", "p2")]);
        assert_eq!(
            serialize_object_model(&o).lines().nth(2),
            Some("p1.color = Color::RED")
        );
        assert_eq!(
            parse_object_model(&serialize_object_model(&o), &model())
                .model
                .unwrap(),
            o
        );
    }

    #[test]
    fn bare_literals_need_a_class_model() {
        let text = "@startobjects\nobject p1 : ProductPassport\np1.color = RED\n@endobjects\n";
        let r = parse_object_model_standalone(text);
        assert!(r.model.is_none());
        assert_eq!(r.diagnostics[0].code, Code::Syntax);
        let r = parse_object_model(&text.replace("RED", "BLUE"), &model());
        assert!(r.model.is_none());
    }

    #[test]
    fn undeclared_objects() {
        let text = "@startobjects\np9.x = 1\nobject a : A\nlink a -- zz : r\n@endobjects\n";
        let r = parse_object_model(text, &model());
        let got: Vec<_> = r
            .diagnostics
            .iter()
            .map(|d| {
                (
                    d.code,
                    d.location.as_ref().unwrap().line,
                    d.location.as_ref().unwrap().column,
                )
            })
            .collect();
        assert_eq!(
            got,
            [(Code::UnknownObject, 2, 1), (Code::UnknownObject, 4, 11)]
        );
    }

    #[test]
    fn syntax_errors_recover_per_line() {
        let text = "@startobjects\nobject a A\na.x 3\nlink a - b : r\nobject b : B\n@endobjects\n";
        let r = parse_object_model_standalone(text);
        let lines: Vec<_> = r
            .diagnostics
            .iter()
            .map(|d| d.location.as_ref().unwrap().line)
            .collect();
        assert_eq!(lines, [2, 3, 4]);
    }
}
