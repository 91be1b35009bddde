//! SQL DDL, one table per concrete class.
//!
//! Inherited attributes are flattened into every concrete subclass table.
//! An association with an end of upper bound 1 becomes foreign key columns
//! on the tables of the opposite (many) side; an association that is many on
//! both ends becomes a join table named after it. Tables are ordered so that
//! referenced tables come first, ties broken by declaration order; join
//! tables follow the class tables.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::diagnostic::{Code, Diagnostic};
use crate::model::{Association, ClassDef, ClassModel, PrimitiveType, ResolvedType};

use super::{snake, CodeWriter, GenOutput, GenResult, GeneratedArtifact};

#[derive(Debug)]
struct Column {
    name: String,
    ty: &'static str,
    not_null: bool,
    inline_pk: bool,
    check: Option<String>,
}

#[derive(Debug)]
struct ForeignKey {
    columns: Vec<String>,
    table: String,
    ref_columns: Vec<String>,
}

#[derive(Debug)]
struct Table {
    name: String,
    origin: String,
    columns: Vec<Column>,
    primary_key: Vec<String>,
    foreign_keys: Vec<ForeignKey>,
    /// Indices of class tables this one references (self excluded).
    depends_on: BTreeSet<usize>,
}

/// Key columns of a referenced class: `(unquoted column, type)`.
type Key = Vec<(String, &'static str)>;

fn sql_type(p: PrimitiveType) -> &'static str {
    match p {
        PrimitiveType::Int => "INTEGER",
        PrimitiveType::Float => "REAL",
        PrimitiveType::Str => "TEXT",
        PrimitiveType::Bool => "BOOLEAN",
    }
}

// Common reserved words across SQL dialects; names that hit one are quoted.
const RESERVED: &[&str] = &[
    "all",
    "and",
    "as",
    "asc",
    "between",
    "by",
    "case",
    "check",
    "column",
    "constraint",
    "create",
    "default",
    "delete",
    "desc",
    "distinct",
    "drop",
    "else",
    "end",
    "exists",
    "foreign",
    "from",
    "grant",
    "group",
    "having",
    "in",
    "index",
    "insert",
    "into",
    "is",
    "join",
    "key",
    "like",
    "limit",
    "not",
    "null",
    "of",
    "on",
    "or",
    "order",
    "primary",
    "references",
    "select",
    "set",
    "table",
    "then",
    "to",
    "union",
    "unique",
    "update",
    "use",
    "user",
    "using",
    "values",
    "when",
    "where",
    "with",
];

/// snake_case identifier, double-quoted when it is a reserved word.
fn ident(name: &str) -> String {
    quoted(snake(name))
}

fn quoted(s: String) -> String {
    if RESERVED.contains(&s.as_str()) {
        format!("\"{s}\"")
    } else {
        s
    }
}

fn unsupported(message: String) -> Diagnostic {
    Diagnostic::error(Code::GenUnsupported, message)
}

/// The class on the upper-bound-1 end, if any: `(referenced end, holder end)`.
fn reference_ends(a: &Association) -> Option<(usize, usize)> {
    let r = a
        .ends
        .iter()
        .position(|e| e.multiplicity.upper == Some(1))?;
    Some((r, 1 - r))
}

pub fn generate_sql_ddl(model: &ClassModel) -> GenResult {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let class_index: HashMap<&str, usize> = model
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.name.as_str(), i))
        .collect();

    // A referenced class must map to exactly one table.
    let single_table =
        |c: &ClassDef| !c.is_abstract && model.concrete_descendants(&c.name).len() == 1;
    let mut referenced: HashSet<&str> = HashSet::new();
    for a in &model.associations {
        let targets: Vec<usize> = match reference_ends(a) {
            Some((r, _)) => vec![r],
            None => {
                if a.ends[0].target_class == a.ends[1].target_class
                    && a.ends[0].navigation_name() == a.ends[1].navigation_name()
                {
                    errors.push(unsupported(format!(
                        "association `{}`: many-to-many self association needs distinct role names",
                        a.name
                    )));
                    continue;
                }
                vec![0, 1]
            }
        };
        for i in targets {
            let cname = a.ends[i].target_class.as_str();
            let Some(c) = model.class(cname) else {
                continue;
            };
            if single_table(c) {
                referenced.insert(cname);
            } else {
                errors.push(unsupported(format!(
                    "association `{}`: end class `{cname}` is abstract or has subclasses and cannot be referenced by a foreign key",
                    a.name
                )));
            }
        }
    }

    let mut keys: HashMap<&str, Key> = HashMap::new();
    for c in &model.classes {
        let props = match model.all_properties(&c.name) {
            Ok(p) => p,
            Err(e) => return Err(vec![Diagnostic::error(Code::UnknownClass, e.to_string())]),
        };
        let mut key: Key = Vec::new();
        for p in props.iter().filter(|p| p.is_id) {
            if let Some(ResolvedType::Primitive(t)) = model.resolve_type(&p.declared_type) {
                key.push((snake(&p.name), sql_type(t)));
            }
        }
        if key.is_empty() && referenced.contains(c.name.as_str()) {
            warnings.push(Diagnostic::warning(
                Code::SyntheticKey,
                format!(
                    "class `{}` has no id attribute; adding synthetic key `id`",
                    c.name
                ),
            ));
            key.push(("id".to_string(), "INTEGER"));
        }
        keys.insert(c.name.as_str(), key);
    }

    let mut tables: Vec<(usize, Table)> = Vec::new();
    for (ci, c) in model.classes.iter().enumerate() {
        if c.is_abstract {
            continue;
        }
        let mut t = Table {
            name: ident(&c.name),
            origin: format!("class `{}`", c.name),
            columns: Vec::new(),
            primary_key: Vec::new(),
            foreign_keys: Vec::new(),
            depends_on: BTreeSet::new(),
        };
        let has_ids = model
            .all_properties(&c.name)
            .unwrap_or_default()
            .iter()
            .any(|p| p.is_id);
        if !has_ids && referenced.contains(c.name.as_str()) {
            t.columns.push(Column {
                name: "id".into(),
                ty: "INTEGER",
                not_null: false,
                inline_pk: true,
                check: None,
            });
        }
        for p in model.all_properties(&c.name).unwrap_or_default() {
            let col = ident(&p.name);
            let (ty, check) = match model.resolve_type(&p.declared_type) {
                Some(ResolvedType::Primitive(prim)) => (sql_type(prim), None),
                Some(ResolvedType::Enum(e)) => {
                    let lits: Vec<String> = e.literals.iter().map(|l| format!("'{l}'")).collect();
                    ("TEXT", Some(format!("{col} IN ({})", lits.join(", "))))
                }
                _ => {
                    errors.push(unsupported(format!(
                        "attribute `{}.{}` has class type `{}`; use an association instead",
                        c.name, p.name, p.declared_type
                    )));
                    continue;
                }
            };
            if p.is_id {
                t.primary_key.push(col.clone());
            }
            t.columns.push(Column {
                name: col,
                ty,
                not_null: p.is_id,
                inline_pk: false,
                check,
            });
        }
        for a in &model.associations {
            let Some((r, h)) = reference_ends(a) else {
                continue;
            };
            if !model.conforms_to(&c.name, &a.ends[h].target_class) {
                continue;
            }
            let target = a.ends[r].target_class.as_str();
            let Some(key) = keys.get(target).filter(|_| referenced.contains(target)) else {
                continue;
            };
            let prefix = snake(a.ends[r].navigation_name());
            let mut fk = ForeignKey {
                columns: Vec::new(),
                table: ident(target),
                ref_columns: Vec::new(),
            };
            for (kc, ty) in key {
                let col = quoted(format!("{prefix}_{kc}"));
                t.columns.push(Column {
                    name: col.clone(),
                    ty,
                    not_null: a.ends[r].multiplicity.lower >= 1,
                    inline_pk: false,
                    check: None,
                });
                fk.columns.push(col);
                fk.ref_columns.push(quoted(kc.clone()));
            }
            t.foreign_keys.push(fk);
            if let Some(&ti) = class_index.get(target) {
                if ti != ci {
                    t.depends_on.insert(ti);
                }
            }
        }
        if t.columns.is_empty() {
            warnings.push(Diagnostic::warning(
                Code::SyntheticKey,
                format!(
                    "class `{}` has no columns; adding synthetic key `id`",
                    c.name
                ),
            ));
            t.columns.push(Column {
                name: "id".into(),
                ty: "INTEGER",
                not_null: false,
                inline_pk: true,
                check: None,
            });
        }
        tables.push((ci, t));
    }

    let mut join_tables = Vec::new();
    for a in &model.associations {
        if reference_ends(a).is_some() {
            continue;
        }
        let usable = a
            .ends
            .iter()
            .all(|e| referenced.contains(e.target_class.as_str()));
        if !usable {
            continue;
        }
        let mut t = Table {
            name: ident(&a.name),
            origin: format!("association `{}`", a.name),
            columns: Vec::new(),
            primary_key: Vec::new(),
            foreign_keys: Vec::new(),
            depends_on: BTreeSet::new(),
        };
        for end in &a.ends {
            let prefix = snake(end.navigation_name());
            let mut fk = ForeignKey {
                columns: Vec::new(),
                table: ident(&end.target_class),
                ref_columns: Vec::new(),
            };
            for (kc, ty) in &keys[end.target_class.as_str()] {
                let col = quoted(format!("{prefix}_{kc}"));
                t.columns.push(Column {
                    name: col.clone(),
                    ty,
                    not_null: true,
                    inline_pk: false,
                    check: None,
                });
                t.primary_key.push(col.clone());
                fk.columns.push(col);
                fk.ref_columns.push(quoted(kc.clone()));
            }
            t.foreign_keys.push(fk);
        }
        join_tables.push(t);
    }

    let mut table_names: HashMap<&str, &str> = HashMap::new();
    for t in tables.iter().map(|(_, t)| t).chain(&join_tables) {
        if let Some(prev) = table_names.insert(&t.name, &t.origin) {
            errors.push(Diagnostic::error(
                Code::NameCollision,
                format!("{prev} and {} both map to table `{}`", t.origin, t.name),
            ));
        }
        let mut cols = HashSet::new();
        for col in &t.columns {
            if !cols.insert(col.name.as_str()) {
                errors.push(Diagnostic::error(
                    Code::NameCollision,
                    format!(
                        "table `{}` ({}) has two columns named `{}`",
                        t.name, t.origin, col.name
                    ),
                ));
            }
        }
    }

    if !errors.is_empty() {
        return Err(errors);
    }

    let order = dependency_order(&tables, model, &mut warnings);
    let mut w = CodeWriter::default();
    if model.name.is_empty() {
        w.line("-- SQL schema generated from a class model");
    } else {
        w.line(&format!(
            "-- SQL schema generated from class model `{}`",
            model.name
        ));
    }
    for t in order.into_iter().map(|i| &tables[i].1).chain(&join_tables) {
        w.blank();
        render_table(&mut w, t);
    }
    Ok(GenOutput {
        artifacts: vec![GeneratedArtifact::new("schema.sql", w.finish())],
        diagnostics: warnings,
    })
}

/// Topological order over class tables (positions into `tables`), always
/// taking the earliest declared ready table. A cycle is reported once and
/// broken at its earliest declared table.
fn dependency_order(
    tables: &[(usize, Table)],
    model: &ClassModel,
    warnings: &mut Vec<Diagnostic>,
) -> Vec<usize> {
    let pos: HashMap<usize, usize> = tables
        .iter()
        .enumerate()
        .map(|(p, (ci, _))| (*ci, p))
        .collect();
    let mut pending: BTreeSet<usize> = (0..tables.len()).collect();
    let mut done = vec![false; tables.len()];
    let mut order = Vec::with_capacity(tables.len());
    let mut reported = false;
    while !pending.is_empty() {
        let ready = pending.iter().copied().find(|&p| {
            tables[p]
                .1
                .depends_on
                .iter()
                .all(|ci| pos.get(ci).is_none_or(|&q| done[q]))
        });
        let next = match ready {
            Some(p) => p,
            None => {
                if !reported {
                    let names: Vec<&str> = pending
                        .iter()
                        .map(|&p| model.classes[tables[p].0].name.as_str())
                        .collect();
                    warnings.push(Diagnostic::warning(
                        Code::FkCycle,
                        format!("foreign keys form a cycle among {}", names.join(", ")),
                    ));
                    reported = true;
                }
                *pending.iter().next().expect("non-empty")
            }
        };
        pending.remove(&next);
        done[next] = true;
        order.push(next);
    }
    order
}

fn render_table(w: &mut CodeWriter, t: &Table) {
    w.line(&format!("CREATE TABLE {} (", t.name));
    w.indent();
    let mut items: Vec<String> = t
        .columns
        .iter()
        .map(|c| {
            let mut s = format!("{} {}", c.name, c.ty);
            if c.not_null {
                s.push_str(" NOT NULL");
            }
            if c.inline_pk {
                s.push_str(" PRIMARY KEY");
            }
            if let Some(check) = &c.check {
                s.push_str(&format!(" CHECK ({check})"));
            }
            s
        })
        .collect();
    if !t.primary_key.is_empty() {
        items.push(format!("PRIMARY KEY ({})", t.primary_key.join(", ")));
    }
    for fk in &t.foreign_keys {
        items.push(format!(
            "FOREIGN KEY ({}) REFERENCES {} ({})",
            fk.columns.join(", "),
            fk.table,
            fk.ref_columns.join(", ")
        ));
    }
    let last = items.len().saturating_sub(1);
    for (i, item) in items.iter().enumerate() {
        if i == last {
            w.line(item);
        } else {
            w.line(&format!("{item},"));
        }
    }
    w.dedent();
    w.line(");");
}
