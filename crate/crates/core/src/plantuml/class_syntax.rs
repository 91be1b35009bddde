//! Class models in the PlantUML subset.
//!
//! ```text
//! model     := "@startuml" [ID] NL decl* "@enduml"
//! decl      := classDecl | enumDecl | assoc | gen
//! classDecl := ["abstract"] ["class"] ID ["{" NL attr* "}"]
//! attr      := ["+"|"-"|"#"] ID ":" typeName ["{id}"] NL
//! enumDecl  := "enum" ID "{" NL (ID NL)+ "}"
//! assoc     := ID [LABEL] ("--"|"*--") [LABEL] ID [":" ID]
//! gen       := ID "<|--" ID            (left side is the general class)
//! LABEL     := '"' [ROLE] [MULT] '"'   e.g. "1", "0..*", "stages 1..*"
//! ```

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use super::lexer::{lex_lines, Line, Tok, Token};
use super::ParseResult;
use crate::diagnostic::{has_errors, Code, Diagnostic, SourceSpan};
use crate::model::{
    is_identifier, validate_class_model, validate_located, Association, AssociationEnd, ClassDef,
    ClassModel, EnumDef, Multiplicity, PrimitiveType, Property, Section, TypeRef,
};

const UNSUPPORTED_KEYWORDS: &[&str] = &[
    "interface",
    "package",
    "namespace",
    "note",
    "skinparam",
    "hide",
    "show",
    "title",
    "legend",
    "header",
    "footer",
    "together",
    "object",
    "annotation",
    "entity",
    "protocol",
    "struct",
    "exception",
    "remove",
    "set",
    "caption",
    "newpage",
    "left",
    "right",
    "top",
    "bottom",
    "circle",
    "diamond",
    "metaclass",
    "stereotype",
    "dataclass",
    "record",
    "usecase",
    "actor",
    "end",
];

pub(crate) struct Cursor<'t> {
    pub toks: &'t [Token],
    pub pos: usize,
    pub line: usize,
}

impl<'t> Cursor<'t> {
    pub fn new(line: &'t Line) -> Self {
        Cursor {
            toks: &line.tokens,
            pos: 0,
            line: line.number,
        }
    }

    pub fn peek(&self) -> Option<&'t Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_at(&self, offset: usize) -> Option<&'t Tok> {
        self.toks.get(self.pos + offset).map(|t| &t.tok)
    }

    pub fn next(&mut self) -> Option<&'t Token> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    /// Column of the current token, or of the last token at end of line.
    pub fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map_or(1, |t| t.col)
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn ident(&mut self) -> Option<&'t str> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Some(s)
            }
            _ => None,
        }
    }

    pub fn found(&self) -> String {
        self.peek()
            .map_or_else(|| "end of line".to_string(), Tok::describe)
    }
}

enum Block {
    Class(usize),
    Enum(usize),
}

struct Parser<'f> {
    file: &'f str,
    diags: Vec<Diagnostic>,
    model: ClassModel,
    class_lines: Vec<usize>,
    enum_lines: Vec<usize>,
    assoc_lines: Vec<usize>,
    gen_lines: Vec<usize>,
    unnamed: Vec<usize>,
    start_line: usize,
}

impl<'f> Parser<'f> {
    fn span(&self, line: usize, col: usize) -> SourceSpan {
        SourceSpan::new(self.file, line, col)
    }

    fn error(&mut self, code: Code, line: usize, col: usize, message: impl Into<String>) {
        let span = self.span(line, col);
        self.diags.push(Diagnostic::error(code, message).at(span));
    }

    fn syntax(&mut self, cur: &Cursor<'_>, expected: &str) {
        let msg = format!("expected {expected}, found {}", cur.found());
        self.error(Code::Syntax, cur.line, cur.col(), msg);
    }

    fn unsupported(&mut self, cur: &Cursor<'_>, what: &str) {
        self.error(
            Code::UnsupportedConstruct,
            cur.line,
            cur.col(),
            format!("{what} is not supported by this PlantUML subset"),
        );
    }

    fn finish_line(&mut self, cur: &Cursor<'_>) -> bool {
        if cur.at_end() {
            true
        } else {
            self.syntax(cur, "end of line");
            false
        }
    }

    fn top_level(&mut self, line: &Line) -> Option<Block> {
        let mut cur = Cursor::new(line);
        let first = cur.peek().expect("lines are non-empty");
        match first {
            Tok::Ident(kw) if kw == "abstract" || kw == "class" => {
                cur.next();
                let is_abstract = kw == "abstract";
                if is_abstract {
                    cur.eat(&Tok::Ident("class".into()));
                }
                self.class_decl(&mut cur, is_abstract)
            }
            Tok::Ident(kw) if kw == "enum" => {
                cur.next();
                self.enum_decl(&mut cur)
            }
            Tok::Ident(kw) if UNSUPPORTED_KEYWORDS.contains(&kw.as_str()) => {
                self.unsupported(&cur, &format!("`{kw}`"));
                None
            }
            Tok::Ident(_) => {
                self.relationship(&mut cur);
                None
            }
            Tok::Directive(d) => {
                let msg = format!("unexpected `@{d}`");
                self.error(Code::Syntax, cur.line, cur.col(), msg);
                None
            }
            Tok::Other(_) | Tok::Stereo | Tok::Arrow(_) => {
                self.unsupported(&cur, &first.describe());
                None
            }
            _ => {
                self.syntax(&cur, "a declaration");
                None
            }
        }
    }

    fn class_decl(&mut self, cur: &mut Cursor<'_>, is_abstract: bool) -> Option<Block> {
        let Some(name) = cur.ident() else {
            self.syntax(cur, "class name");
            return None;
        };
        match cur.peek() {
            Some(Tok::Stereo) => {
                self.unsupported(cur, "stereotype");
                return None;
            }
            Some(Tok::Other('<')) => {
                self.unsupported(cur, "generic class");
                return None;
            }
            Some(Tok::Ident(kw)) if kw == "extends" || kw == "implements" => {
                self.unsupported(cur, &format!("`{kw}`"));
                return None;
            }
            _ => {}
        }
        let opens = cur.eat(&Tok::LBrace);
        let closes = opens && cur.eat(&Tok::RBrace);
        if !self.finish_line(cur) {
            return None;
        }
        let mut class = ClassDef::new(name);
        class.is_abstract = is_abstract;
        self.model.classes.push(class);
        self.class_lines.push(cur.line);
        let idx = self.model.classes.len() - 1;
        (opens && !closes).then_some(Block::Class(idx))
    }

    fn enum_decl(&mut self, cur: &mut Cursor<'_>) -> Option<Block> {
        let Some(name) = cur.ident() else {
            self.syntax(cur, "enumeration name");
            return None;
        };
        if cur.peek() == Some(&Tok::Stereo) {
            self.unsupported(cur, "stereotype");
            return None;
        }
        if !cur.eat(&Tok::LBrace) {
            self.syntax(cur, "`{`");
            return None;
        }
        let closes = cur.eat(&Tok::RBrace);
        if !self.finish_line(cur) {
            return None;
        }
        self.model
            .enumerations
            .push(EnumDef::new(name, Vec::<String>::new()));
        self.enum_lines.push(cur.line);
        (!closes).then_some(Block::Enum(self.model.enumerations.len() - 1))
    }

    fn attribute(&mut self, line: &Line, class: usize) {
        let mut cur = Cursor::new(line);
        match cur.peek() {
            Some(Tok::Plus | Tok::Minus | Tok::Hash) => {
                cur.next();
            }
            Some(Tok::Arrow(_) | Tok::Dot | Tok::Eq | Tok::LBrace | Tok::Other(_)) => {
                self.unsupported(&cur, "class body separator or modifier");
                return;
            }
            _ => {}
        }
        let Some(name) = cur.ident() else {
            self.syntax(&cur, "attribute name");
            return;
        };
        if cur.peek() == Some(&Tok::LParen) {
            self.unsupported(&cur, "method");
            return;
        }
        if !cur.eat(&Tok::Colon) {
            self.syntax(&cur, "`:`");
            return;
        }
        let Some(type_name) = cur.ident() else {
            self.syntax(&cur, "type name");
            return;
        };
        let mut is_id = false;
        if cur.peek() == Some(&Tok::LBrace) {
            let col = cur.col();
            cur.next();
            match (cur.ident(), cur.eat(&Tok::RBrace)) {
                (Some("id"), true) => is_id = true,
                _ => {
                    self.error(
                        Code::UnsupportedConstruct,
                        line.number,
                        col,
                        "only the `{id}` modifier is supported",
                    );
                    return;
                }
            }
        }
        if !self.finish_line(&cur) {
            return;
        }
        let declared_type = match PrimitiveType::from_name(type_name) {
            Some(p) => TypeRef::Primitive(p),
            None => TypeRef::named(type_name),
        };
        self.model.classes[class].properties.push(Property {
            name: name.to_string(),
            declared_type,
            is_id,
        });
    }

    fn literal(&mut self, line: &Line, enumeration: usize) {
        let mut cur = Cursor::new(line);
        let Some(name) = cur.ident() else {
            self.syntax(&cur, "enumeration literal");
            return;
        };
        if self.finish_line(&cur) {
            self.model.enumerations[enumeration]
                .literals
                .push(name.to_string());
        }
    }

    fn label(
        &mut self,
        line: usize,
        col: usize,
        text: &str,
    ) -> Option<(Option<String>, Multiplicity)> {
        let parts: Vec<&str> = text.split_whitespace().collect();
        let bad = |p: &mut Self| {
            p.error(
                Code::Syntax,
                line,
                col,
                format!("malformed association end label \"{text}\" (expected \"[role] [multiplicity]\")"),
            );
            None
        };
        match parts.as_slice() {
            [one] => {
                if let Ok(m) = one.parse::<Multiplicity>() {
                    Some((None, m))
                } else if is_identifier(one) {
                    Some((Some(one.to_string()), Multiplicity::default()))
                } else {
                    bad(self)
                }
            }
            [role, mult] if is_identifier(role) => match mult.parse::<Multiplicity>() {
                Ok(m) => Some((Some(role.to_string()), m)),
                Err(_) => bad(self),
            },
            _ => bad(self),
        }
    }

    fn relationship(&mut self, cur: &mut Cursor<'_>) {
        let left = cur.ident().expect("caller checked for an identifier");
        let mut left_label = None;
        if let Some(Tok::Str(s)) = cur.peek() {
            left_label = Some((cur.col(), s.clone()));
            cur.next();
        }
        let Some(Tok::Arrow(arrow)) = cur.peek() else {
            if cur.peek() == Some(&Tok::LParen) {
                self.unsupported(cur, "method declaration outside a class body");
            } else {
                self.syntax(cur, "a relationship arrow (`--`, `*--` or `<|--`)");
            }
            return;
        };
        let arrow_col = cur.col();
        cur.next();
        let mut right_label = None;
        if let Some(Tok::Str(s)) = cur.peek() {
            right_label = Some((cur.col(), s.clone()));
            cur.next();
        }
        let Some(right) = cur.ident() else {
            self.syntax(cur, "class name");
            return;
        };
        match arrow.as_str() {
            "<|--" => {
                if left_label.is_some() || right_label.is_some() {
                    self.error(
                        Code::Syntax,
                        cur.line,
                        arrow_col,
                        "generalizations take no multiplicities",
                    );
                    return;
                }
                if self.finish_line(cur) {
                    self.model
                        .generalizations
                        .push(crate::model::Generalization::new(left, right));
                    self.gen_lines.push(cur.line);
                }
            }
            "--" | "*--" => {
                let mut name = None;
                if cur.eat(&Tok::Colon) {
                    match cur.ident() {
                        Some(n) => name = Some(n.to_string()),
                        None => {
                            self.syntax(cur, "association name");
                            return;
                        }
                    }
                }
                if !self.finish_line(cur) {
                    return;
                }
                let mut ends = Vec::with_capacity(2);
                for (class, label) in [(left, left_label), (right, right_label)] {
                    let (role, multiplicity) = match label {
                        None => (None, Multiplicity::default()),
                        Some((col, text)) => match self.label(cur.line, col, &text) {
                            Some(parsed) => parsed,
                            None => return,
                        },
                    };
                    let mut end = AssociationEnd::new(class, multiplicity);
                    end.role = role;
                    ends.push(end);
                }
                ends[0].is_composite = arrow == "*--";
                let second = ends.pop().expect("two ends");
                let first = ends.pop().expect("two ends");
                if name.is_none() {
                    self.unnamed.push(self.model.associations.len());
                }
                self.model.associations.push(Association::new(
                    name.unwrap_or_default(),
                    first,
                    second,
                ));
                self.assoc_lines.push(cur.line);
            }
            other => {
                let msg =
                    format!("relationship `{other}` is not supported by this PlantUML subset");
                self.error(Code::UnsupportedConstruct, cur.line, arrow_col, msg);
            }
        }
    }

    /// `<EndA>_<EndB>_<k>`, `k` counting per class pair and skipping names
    /// already taken.
    fn name_unnamed(&mut self) {
        let mut taken: HashSet<String> = self
            .model
            .associations
            .iter()
            .filter(|a| !a.name.is_empty())
            .map(|a| a.name.clone())
            .collect();
        let mut counters: HashMap<(String, String), usize> = HashMap::new();
        for &i in &self.unnamed {
            let a = &self.model.associations[i];
            let key = (
                a.ends[0].target_class.clone(),
                a.ends[1].target_class.clone(),
            );
            let k = counters.entry(key.clone()).or_insert(0);
            let name = loop {
                *k += 1;
                let candidate = format!("{}_{}_{}", key.0, key.1, k);
                if !taken.contains(&candidate) {
                    break candidate;
                }
            };
            taken.insert(name.clone());
            self.model.associations[i].name = name;
        }
    }
}

/// Parses a class model, reporting positions against `"<input>"`.
pub fn parse_class_model(text: &str) -> ParseResult<ClassModel> {
    parse_class_model_file("<input>", text)
}

/// Parses a class model. On success the result also passed
/// [`validate_class_model`]; well-formedness findings are reported with the
/// line of the offending declaration.
pub fn parse_class_model_file(file: &str, text: &str) -> ParseResult<ClassModel> {
    let (lines, lex_errors) = lex_lines(text);
    let mut p = Parser {
        file,
        diags: lex_errors
            .into_iter()
            .map(|e| {
                Diagnostic::error(Code::Syntax, e.message).at(SourceSpan::new(file, e.line, e.col))
            })
            .collect(),
        model: ClassModel::default(),
        class_lines: Vec::new(),
        enum_lines: Vec::new(),
        assoc_lines: Vec::new(),
        gen_lines: Vec::new(),
        unnamed: Vec::new(),
        start_line: 1,
    };

    let mut iter = lines.iter();
    match iter.next() {
        Some(line) if line.tokens[0].tok == Tok::Directive("startuml".into()) => {
            p.start_line = line.number;
            let mut cur = Cursor::new(line);
            cur.next();
            if let Some(name) = cur.ident() {
                p.model.name = name.to_string();
            }
            p.finish_line(&cur);
        }
        Some(line) => {
            let cur = Cursor::new(line);
            p.syntax(&cur, "`@startuml`");
        }
        None => p.error(
            Code::Syntax,
            1,
            1,
            "expected `@startuml`, found end of input",
        ),
    }

    let mut block: Option<(Block, usize)> = None;
    let mut ended = false;
    let mut last_line = lines.last().map_or(1, |l| l.number);
    for line in iter {
        last_line = line.number;
        let first = &line.tokens[0].tok;
        if ended {
            let cur = Cursor::new(line);
            p.syntax(&cur, "end of input after `@enduml`");
            break;
        }
        if *first == Tok::Directive("enduml".into()) {
            if let Some((_, open_line)) = block.take() {
                p.error(Code::Syntax, open_line, 1, "unclosed `{` before `@enduml`");
            }
            let cur = Cursor {
                toks: &line.tokens,
                pos: 1,
                line: line.number,
            };
            p.finish_line(&cur);
            ended = true;
            continue;
        }
        match &block {
            Some(_) if *first == Tok::RBrace => {
                let cur = Cursor {
                    toks: &line.tokens,
                    pos: 1,
                    line: line.number,
                };
                p.finish_line(&cur);
                block = None;
            }
            Some((Block::Class(i), _)) => p.attribute(line, *i),
            Some((Block::Enum(i), _)) => p.literal(line, *i),
            None => {
                if let Some(b) = p.top_level(line) {
                    block = Some((b, line.number));
                }
            }
        }
    }
    if !ended && !lines.is_empty() {
        if let Some((_, open_line)) = block {
            p.error(Code::Syntax, open_line, 1, "unclosed `{`");
        }
        p.error(
            Code::Syntax,
            last_line,
            1,
            "expected `@enduml` before end of input",
        );
    }

    p.name_unnamed();

    if !has_errors(&p.diags) {
        for (section, index, diag) in validate_located(&p.model) {
            let line = match section {
                Section::Model => p.start_line,
                Section::Enum => p.enum_lines[index],
                Section::Class => p.class_lines[index],
                Section::Association => p.assoc_lines[index],
                Section::Generalization => p.gen_lines.get(index).copied().unwrap_or(p.start_line),
            };
            let span = p.span(line, 1);
            p.diags.push(diag.at(span));
        }
    }

    let model = (!has_errors(&p.diags)).then_some(p.model);
    ParseResult {
        model,
        diagnostics: p.diags,
    }
}

/// Canonical text: `@startuml [name]`, then enumerations, classes,
/// associations and generalizations in model order, two-space indented
/// bodies, one member per line, LF newlines.
pub fn serialize_class_model(model: &ClassModel) -> Result<String, Vec<Diagnostic>> {
    let mut problems = validate_class_model(model);
    for a in &model.associations {
        if a.ends[1].is_composite {
            problems.push(Diagnostic::error(
                Code::UnsupportedConstruct,
                format!(
                    "association `{}` is composite on its second end, which `*--` cannot express",
                    a.name
                ),
            ));
        }
    }
    if has_errors(&problems) {
        return Err(problems);
    }

    let mut out = String::new();
    if model.name.is_empty() {
        out.push_str("@startuml\n");
    } else {
        let _ = writeln!(out, "@startuml {}", model.name);
    }
    for e in &model.enumerations {
        let _ = writeln!(out, "enum {} {{", e.name);
        for lit in &e.literals {
            let _ = writeln!(out, "  {lit}");
        }
        out.push_str("}\n");
    }
    for c in &model.classes {
        let kw = if c.is_abstract {
            "abstract class"
        } else {
            "class"
        };
        let _ = writeln!(out, "{kw} {} {{", c.name);
        for p in &c.properties {
            let id = if p.is_id { " {id}" } else { "" };
            let _ = writeln!(out, "  {} : {}{id}", p.name, p.declared_type);
        }
        out.push_str("}\n");
    }
    for a in &model.associations {
        let label = |end: &AssociationEnd| match &end.role {
            Some(role) => format!("\"{role} {}\"", end.multiplicity),
            None => format!("\"{}\"", end.multiplicity),
        };
        let arrow = if a.ends[0].is_composite { "*--" } else { "--" };
        let _ = writeln!(
            out,
            "{} {} {arrow} {} {} : {}",
            a.ends[0].target_class,
            label(&a.ends[0]),
            label(&a.ends[1]),
            a.ends[1].target_class,
            a.name
        );
    }
    for g in &model.generalizations {
        let _ = writeln!(out, "{} <|-- {}", g.general, g.specific);
    }
    out.push_str("@enduml\n");
    Ok(out)
}
