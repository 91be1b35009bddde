//! A small recursive-descent checker for the DDL subset the SQL generator
//! emits. It parses the script and then checks that keys and foreign keys
//! refer to declared tables and columns.

use std::fmt;

/// Words that may not appear unquoted as table or column names.
const KEYWORDS: &[&str] = &[
    "all",
    "alter",
    "and",
    "as",
    "between",
    "by",
    "check",
    "column",
    "constraint",
    "create",
    "default",
    "delete",
    "distinct",
    "drop",
    "exists",
    "foreign",
    "from",
    "group",
    "having",
    "in",
    "insert",
    "into",
    "is",
    "join",
    "key",
    "like",
    "not",
    "null",
    "on",
    "or",
    "order",
    "primary",
    "references",
    "select",
    "set",
    "table",
    "to",
    "union",
    "unique",
    "update",
    "use",
    "user",
    "values",
    "where",
    "with",
];

const TYPES: &[&str] = &["INTEGER", "REAL", "TEXT", "BOOLEAN"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub sql_type: String,
    pub not_null: bool,
    pub check_values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForeignKey {
    pub columns: Vec<String>,
    pub table: String,
    pub referenced: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<Column>,
    pub primary_key: Vec<String>,
    pub foreign_keys: Vec<ForeignKey>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqlError(pub String);

impl fmt::Display for SqlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum T {
    Word(String),
    Quoted(String),
    Text(String),
    P(char),
}

fn tokenize(src: &str) -> Result<Vec<T>, SqlError> {
    let mut out = Vec::new();
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '-' && cs.get(i + 1) == Some(&'-') {
            while i < cs.len() && cs[i] != '\n' {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let s = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(T::Word(cs[s..i].iter().collect()));
        } else if c == '"' || c == '\'' {
            let s = i + 1;
            i += 1;
            while i < cs.len() && cs[i] != c {
                i += 1;
            }
            if i == cs.len() {
                return Err(SqlError(format!("unterminated {c} literal")));
            }
            let body: String = cs[s..i].iter().collect();
            out.push(if c == '"' {
                T::Quoted(body)
            } else {
                T::Text(body)
            });
            i += 1;
        } else if "(),;".contains(c) {
            out.push(T::P(c));
            i += 1;
        } else {
            return Err(SqlError(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct P {
    toks: Vec<T>,
    pos: usize,
}

impl P {
    fn err<X>(&self, what: &str) -> Result<X, SqlError> {
        Err(SqlError(format!(
            "expected {what} at token {} ({:?})",
            self.pos,
            self.toks.get(self.pos)
        )))
    }

    fn kw(&mut self, k: &str) -> bool {
        if matches!(self.toks.get(self.pos), Some(T::Word(w)) if w == k) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, k: &str) -> Result<(), SqlError> {
        if self.kw(k) {
            Ok(())
        } else {
            self.err(k)
        }
    }

    fn punct(&mut self, c: char) -> bool {
        if self.toks.get(self.pos) == Some(&T::P(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), SqlError> {
        if self.punct(c) {
            Ok(())
        } else {
            self.err(&format!("`{c}`"))
        }
    }

    fn name(&mut self) -> Result<String, SqlError> {
        match self.toks.get(self.pos).cloned() {
            Some(T::Quoted(s)) if !s.is_empty() => {
                self.pos += 1;
                Ok(s)
            }
            Some(T::Word(w))
                if w.chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') =>
            {
                if KEYWORDS.contains(&w.as_str()) {
                    return Err(SqlError(format!("keyword `{w}` used as an unquoted name")));
                }
                self.pos += 1;
                Ok(w)
            }
            _ => self.err("a lower-case name"),
        }
    }

    fn names(&mut self) -> Result<Vec<String>, SqlError> {
        self.expect('(')?;
        let mut out = vec![self.name()?];
        while self.punct(',') {
            out.push(self.name()?);
        }
        self.expect(')')?;
        Ok(out)
    }

    fn table(&mut self) -> Result<Table, SqlError> {
        self.expect_kw("CREATE")?;
        self.expect_kw("TABLE")?;
        let mut t = Table {
            name: self.name()?,
            columns: Vec::new(),
            primary_key: Vec::new(),
            foreign_keys: Vec::new(),
        };
        self.expect('(')?;
        loop {
            if self.kw("PRIMARY") {
                self.expect_kw("KEY")?;
                if !t.primary_key.is_empty() {
                    return Err(SqlError(format!("table {} has two primary keys", t.name)));
                }
                t.primary_key = self.names()?;
            } else if self.kw("FOREIGN") {
                self.expect_kw("KEY")?;
                let columns = self.names()?;
                self.expect_kw("REFERENCES")?;
                let table = self.name()?;
                let referenced = self.names()?;
                t.foreign_keys.push(ForeignKey {
                    columns,
                    table,
                    referenced,
                });
            } else {
                let name = self.name()?;
                let sql_type = match self.toks.get(self.pos) {
                    Some(T::Word(w)) if TYPES.contains(&w.as_str()) => w.clone(),
                    _ => return self.err("a column type"),
                };
                self.pos += 1;
                let not_null = if self.kw("NOT") {
                    self.expect_kw("NULL")?;
                    true
                } else {
                    false
                };
                if self.kw("PRIMARY") {
                    self.expect_kw("KEY")?;
                    if !t.primary_key.is_empty() {
                        return Err(SqlError(format!("table {} has two primary keys", t.name)));
                    }
                    t.primary_key = vec![name.clone()];
                }
                let mut check_values = Vec::new();
                if self.kw("CHECK") {
                    self.expect('(')?;
                    if self.name()? != name {
                        return Err(SqlError(format!("CHECK on {name} names another column")));
                    }
                    self.expect_kw("IN")?;
                    self.expect('(')?;
                    loop {
                        match self.toks.get(self.pos).cloned() {
                            Some(T::Text(s)) => check_values.push(s),
                            _ => return self.err("a string literal"),
                        }
                        self.pos += 1;
                        if !self.punct(',') {
                            break;
                        }
                    }
                    self.expect(')')?;
                    self.expect(')')?;
                }
                if t.column(&name).is_some() {
                    return Err(SqlError(format!("column {name} repeats in {}", t.name)));
                }
                t.columns.push(Column {
                    name,
                    sql_type,
                    not_null,
                    check_values,
                });
            }
            if !self.punct(',') {
                break;
            }
        }
        self.expect(')')?;
        self.expect(';')?;
        Ok(t)
    }
}

/// Parses `script` and checks referential sanity: every key column exists,
/// every foreign key names a declared table's primary key with matching
/// column types. Returns the tables in script order.
pub fn check_sql(script: &str) -> Result<Vec<Table>, SqlError> {
    let mut p = P {
        toks: tokenize(script)?,
        pos: 0,
    };
    let mut tables: Vec<Table> = Vec::new();
    while p.pos < p.toks.len() {
        let t = p.table()?;
        if tables.iter().any(|u| u.name == t.name) {
            return Err(SqlError(format!("table {} declared twice", t.name)));
        }
        tables.push(t);
    }
    for t in &tables {
        for k in &t.primary_key {
            if t.column(k).is_none() {
                return Err(SqlError(format!(
                    "primary key column {k} missing from {}",
                    t.name
                )));
            }
        }
        for fk in &t.foreign_keys {
            let Some(target) = tables.iter().find(|u| u.name == fk.table) else {
                return Err(SqlError(format!(
                    "{} references unknown table {}",
                    t.name, fk.table
                )));
            };
            if fk.referenced != target.primary_key || fk.columns.len() != fk.referenced.len() {
                return Err(SqlError(format!(
                    "{} references a non-key of {}",
                    t.name, fk.table
                )));
            }
            for (c, r) in fk.columns.iter().zip(&fk.referenced) {
                let (Some(c), Some(r)) = (t.column(c), target.column(r)) else {
                    return Err(SqlError(format!(
                        "foreign key column missing in {} -> {}",
                        t.name, fk.table
                    )));
                };
                if c.sql_type != r.sql_type {
                    return Err(SqlError(format!(
                        "type mismatch {}.{} -> {}.{}",
                        t.name, c.name, fk.table, r.name
                    )));
                }
            }
        }
    }
    Ok(tables)
}

/// Foreign keys pointing at a table declared later in the script.
pub fn forward_references(tables: &[Table]) -> usize {
    tables
        .iter()
        .enumerate()
        .map(|(i, t)| {
            t.foreign_keys
                .iter()
                .filter(|fk| tables[..i].iter().all(|u| u.name != fk.table) && fk.table != t.name)
                .count()
        })
        .sum()
}
