//! Parser for invariant files:
//!
//! ```text
//! file       := ( "context" IDENT "inv" IDENT ":" expr )*
//! expr       := or ( "implies" expr )?
//! or         := and ( "or" and )*
//! and        := equality ( "and" equality )*
//! equality   := relational ( ("=" | "<>") relational )*
//! relational := additive ( ("<" | "<=" | ">" | ">=") additive )*
//! additive   := mult ( ("+" | "-") mult )*
//! mult       := unary ( ("*" | "/") unary )*
//! unary      := ("not" | "-") unary | postfix
//! postfix    := primary ( "." IDENT | "->" IDENT "(" args? ")" )*
//! args       := ( IDENT "|" )? expr
//! primary    := literal | "self" | IDENT | "(" expr ")"
//!             | "if" expr "then" expr "else" expr "endif"
//! ```
//!
//! `--` starts a comment. Unary minus applied to a number literal yields a
//! negative literal rather than a negation node.

use std::collections::HashMap;

use crate::diagnostic::{Code, Diagnostic, SourceSpan};
use crate::model::Value;
use crate::plantuml::ParseResult;

use super::ast::{BinaryOp, CollectionOpKind, OclConstraint, OclExpr, UnaryOp};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Float(f64),
    Str(String),
    Sym(&'static str),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("number `{i}`"),
            Tok::Float(x) => format!("number `{x:?}`"),
            Tok::Str(s) => format!("string '{s}'"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const KEYWORDS: &[&str] = &[
    "context", "inv", "self", "and", "or", "not", "implies", "if", "then", "else", "endif", "true",
    "false", "null",
];

// Longest first so `<=` wins over `<`.
const SYMBOLS: &[&str] = &[
    "->", "<>", "<=", ">=", "::", "<", ">", "=", "+", "-", "*", "/", "(", ")", ".", ",", ":", "|",
];

struct SyntaxError {
    message: String,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let chars: Vec<char> = raw.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let err = |col: usize, message: String| SyntaxError { message, line, col };
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '-' && chars.get(i + 1) == Some(&'-') {
                break;
            }
            let tok = if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                Tok::Ident(chars[start..i].iter().collect())
            } else if c.is_ascii_digit() {
                let start = i;
                i += 1;
                while chars.get(i).is_some_and(char::is_ascii_digit) {
                    i += 1;
                }
                let mut is_float = false;
                if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(char::is_ascii_digit)
                {
                    is_float = true;
                    i += 1;
                    while chars.get(i).is_some_and(char::is_ascii_digit) {
                        i += 1;
                    }
                }
                if matches!(chars.get(i), Some('e' | 'E')) {
                    let mut j = i + 1;
                    if matches!(chars.get(j), Some('+' | '-')) {
                        j += 1;
                    }
                    if chars.get(j).is_some_and(char::is_ascii_digit) {
                        is_float = true;
                        i = j;
                        while chars.get(i).is_some_and(char::is_ascii_digit) {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                if is_float {
                    Tok::Float(
                        text.parse()
                            .map_err(|_| err(col, format!("invalid number `{text}`")))?,
                    )
                } else {
                    Tok::Int(
                        text.parse()
                            .map_err(|_| err(col, format!("integer `{text}` out of range")))?,
                    )
                }
            } else if c == '\'' {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(err(col, "unterminated string literal".into())),
                        Some('\'') => {
                            i += 1;
                            break;
                        }
                        Some('\\') => {
                            s.push(match chars.get(i + 1) {
                                Some('\'') => '\'',
                                Some('\\') => '\\',
                                Some('n') => '\n',
                                Some('t') => '\t',
                                _ => {
                                    return Err(err(
                                        i + 1,
                                        "invalid escape in string literal".into(),
                                    ))
                                }
                            });
                            i += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                Tok::Str(s)
            } else {
                let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
                match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                    Some(sym) => {
                        i += sym.len();
                        Tok::Sym(sym)
                    }
                    None => return Err(err(col, format!("unexpected character `{c}`"))),
                }
            };
            out.push(Token { tok, line, col });
        }
    }
    let line = text.lines().count().max(1);
    let col = text.lines().last().map_or(1, |l| l.chars().count() + 1);
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        let t = self.peek();
        Err(SyntaxError {
            message: message.into(),
            line: t.line,
            col: t.col,
        })
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        self.error(format!(
            "expected {wanted}, found {}",
            self.peek().tok.describe()
        ))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek().tok, Tok::Sym(x) if x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(x) if x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.is_sym(s);
        if hit {
            self.advance();
        }
        hit
    }

    fn eat_kw(&mut self, s: &str) -> bool {
        let hit = self.is_kw(s);
        if hit {
            self.advance();
        }
        hit
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    fn expect_kw(&mut self, s: &str) -> PResult<()> {
        if self.eat_kw(s) {
            Ok(())
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    /// A non-keyword identifier.
    fn name(&mut self, what: &str) -> PResult<String> {
        match &self.peek().tok {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => self.unexpected(what),
        }
    }

    fn constraint(&mut self) -> PResult<(OclConstraint, usize, usize)> {
        let start = self.peek().clone();
        self.expect_kw("context")?;
        let context_class = self.name("a class name")?;
        self.expect_kw("inv")?;
        let name = self.name("an invariant name")?;
        self.expect_sym(":")?;
        let body = self.expr()?;
        if !matches!(self.peek().tok, Tok::Eof) && !self.is_kw("context") {
            return self.unexpected("an operator or `context`");
        }
        Ok((
            OclConstraint {
                context_class,
                name,
                body,
            },
            start.line,
            start.col,
        ))
    }

    fn expr(&mut self) -> PResult<OclExpr> {
        let lhs = self.or()?;
        if self.eat_kw("implies") {
            let rhs = self.expr()?;
            return Ok(OclExpr::binary(BinaryOp::Implies, lhs, rhs));
        }
        Ok(lhs)
    }

    fn left_assoc(
        &mut self,
        next: fn(&mut Self) -> PResult<OclExpr>,
        ops: &[(&str, BinaryOp)],
    ) -> PResult<OclExpr> {
        let mut lhs = next(self)?;
        'outer: loop {
            for (text, op) in ops {
                let hit = if text.chars().all(|c| c.is_ascii_alphabetic()) {
                    self.eat_kw(text)
                } else {
                    self.eat_sym(text)
                };
                if hit {
                    let rhs = next(self)?;
                    lhs = OclExpr::binary(*op, lhs, rhs);
                    continue 'outer;
                }
            }
            return Ok(lhs);
        }
    }

    fn or(&mut self) -> PResult<OclExpr> {
        self.left_assoc(Self::and, &[("or", BinaryOp::Or)])
    }

    fn and(&mut self) -> PResult<OclExpr> {
        self.left_assoc(Self::equality, &[("and", BinaryOp::And)])
    }

    fn equality(&mut self) -> PResult<OclExpr> {
        self.left_assoc(
            Self::relational,
            &[("=", BinaryOp::Eq), ("<>", BinaryOp::Ne)],
        )
    }

    fn relational(&mut self) -> PResult<OclExpr> {
        self.left_assoc(
            Self::additive,
            &[
                ("<=", BinaryOp::Le),
                (">=", BinaryOp::Ge),
                ("<", BinaryOp::Lt),
                (">", BinaryOp::Gt),
            ],
        )
    }

    fn additive(&mut self) -> PResult<OclExpr> {
        self.left_assoc(Self::mult, &[("+", BinaryOp::Add), ("-", BinaryOp::Sub)])
    }

    fn mult(&mut self) -> PResult<OclExpr> {
        self.left_assoc(Self::unary, &[("*", BinaryOp::Mul), ("/", BinaryOp::Div)])
    }

    fn unary(&mut self) -> PResult<OclExpr> {
        if self.eat_kw("not") {
            return Ok(OclExpr::unary(UnaryOp::Not, self.unary()?));
        }
        if self.eat_sym("-") {
            // `-` directly before a number literal negates the literal.
            match self.peek().tok {
                Tok::Int(i) => {
                    self.advance();
                    return Ok(OclExpr::lit(Value::Int(-i)));
                }
                Tok::Float(x) => {
                    self.advance();
                    return Ok(OclExpr::lit(Value::Float(-x)));
                }
                _ => {}
            }
            return Ok(OclExpr::unary(UnaryOp::Neg, self.unary()?));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<OclExpr> {
        let mut e = self.primary()?;
        loop {
            if self.eat_sym(".") {
                let prop = self.name("a property or role name")?;
                if self.is_sym("(") {
                    return self.error(format!("operation call `{prop}(...)` is not supported"));
                }
                e = e.nav(&prop);
            } else if self.eat_sym("->") {
                e = self.collection_op(e)?;
            } else {
                return Ok(e);
            }
        }
    }

    fn collection_op(&mut self, source: OclExpr) -> PResult<OclExpr> {
        let Tok::Ident(name) = self.peek().tok.clone() else {
            return self.unexpected("a collection operation");
        };
        let Some(op) = CollectionOpKind::from_name(&name) else {
            return self.error(format!("unsupported collection operation `{name}`"));
        };
        self.advance();
        self.expect_sym("(")?;
        let mut iterator = None;
        let mut body = None;
        if op.is_iterator() {
            if matches!(self.peek_at(1), Tok::Sym("|")) {
                iterator = Some(self.name("an iterator variable")?);
                self.expect_sym("|")?;
            }
            body = Some(self.expr()?);
        } else if op.takes_argument() {
            body = Some(self.expr()?);
        }
        self.expect_sym(")")?;
        Ok(source.coll(op, iterator.as_deref(), body))
    }

    fn primary(&mut self) -> PResult<OclExpr> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(i) => {
                self.advance();
                Ok(OclExpr::lit(Value::Int(i)))
            }
            Tok::Float(x) => {
                self.advance();
                Ok(OclExpr::lit(Value::Float(x)))
            }
            Tok::Str(s) => {
                self.advance();
                Ok(OclExpr::lit(Value::Str(s)))
            }
            Tok::Sym("(") => {
                self.advance();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(ref word) => match word.as_str() {
                "self" => {
                    self.advance();
                    Ok(OclExpr::SelfRef)
                }
                "true" | "false" => {
                    self.advance();
                    Ok(OclExpr::lit(Value::Bool(word == "true")))
                }
                "null" => {
                    self.advance();
                    Ok(OclExpr::lit(Value::Null))
                }
                "if" => {
                    self.advance();
                    let c = self.expr()?;
                    self.expect_kw("then")?;
                    let a = self.expr()?;
                    self.expect_kw("else")?;
                    let b = self.expr()?;
                    self.expect_kw("endif")?;
                    Ok(OclExpr::if_then_else(c, a, b))
                }
                w if KEYWORDS.contains(&w) => self.unexpected("an expression"),
                _ => {
                    let name = self.name("an expression")?;
                    if self.eat_sym("::") {
                        let literal = self.name("an enumeration literal")?;
                        return Ok(OclExpr::lit(Value::Enum {
                            enumeration: name,
                            literal,
                        }));
                    }
                    Ok(OclExpr::VarRef(name))
                }
            },
            _ => self.unexpected("an expression"),
        }
    }

    /// Skips to the next `context` keyword after an error in the
    /// constraint starting at token `start`.
    fn recover(&mut self, start: usize) {
        if self.pos == start {
            self.advance();
        }
        while !matches!(self.peek().tok, Tok::Eof) && !self.is_kw("context") {
            self.advance();
        }
    }
}

/// Parses an invariant file. Syntax errors are collected per constraint;
/// parsing resumes at the next `context`.
pub fn parse_ocl(text: &str) -> ParseResult<Vec<OclConstraint>> {
    parse_ocl_file("<input>", text)
}

pub fn parse_ocl_file(file: &str, text: &str) -> ParseResult<Vec<OclConstraint>> {
    let syntax = |e: SyntaxError| {
        Diagnostic::error(Code::Syntax, e.message).at(SourceSpan::new(file, e.line, e.col))
    };
    let toks = match lex(text) {
        Ok(t) => t,
        Err(e) => {
            return ParseResult {
                model: None,
                diagnostics: vec![syntax(e)],
            }
        }
    };
    let mut p = Parser { toks, pos: 0 };
    let mut constraints = Vec::new();
    let mut diagnostics = Vec::new();
    let mut seen: HashMap<String, ()> = HashMap::new();
    while !matches!(p.peek().tok, Tok::Eof) {
        let start = p.pos;
        match p.constraint() {
            Ok((c, line, col)) => {
                if seen.insert(c.name.clone(), ()).is_some() {
                    diagnostics.push(
                        Diagnostic::error(
                            Code::DupConstraint,
                            format!("duplicate invariant name `{}`", c.name),
                        )
                        .at(SourceSpan::new(file, line, col)),
                    );
                }
                constraints.push(c);
            }
            Err(e) => {
                diagnostics.push(syntax(e));
                p.recover(start);
            }
        }
    }
    let model = (!crate::diagnostic::has_errors(&diagnostics)).then_some(constraints);
    ParseResult { model, diagnostics }
}

/// Parses a standalone expression, as used for state machine guards.
pub fn parse_expression(text: &str) -> Result<OclExpr, Diagnostic> {
    let syntax = |e: SyntaxError| {
        Diagnostic::error(Code::Syntax, e.message).at(SourceSpan::new("<expr>", e.line, e.col))
    };
    let mut p = Parser {
        toks: lex(text).map_err(syntax)?,
        pos: 0,
    };
    let e = p.expr().map_err(syntax)?;
    if !matches!(p.peek().tok, Tok::Eof) {
        return p.unexpected::<OclExpr>("end of expression").map_err(syntax);
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expr(s: &str) -> OclExpr {
        parse_expression(s).unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(
            expr("1 + 2 * 3"),
            OclExpr::binary(
                BinaryOp::Add,
                OclExpr::lit(Value::Int(1)),
                OclExpr::binary(
                    BinaryOp::Mul,
                    OclExpr::lit(Value::Int(2)),
                    OclExpr::lit(Value::Int(3))
                )
            )
        );
        // implies is right associative and binds loosest.
        let e = expr("a implies b implies c or d");
        let OclExpr::Binary(BinaryOp::Implies, _, rhs) = e else {
            panic!()
        };
        assert!(matches!(*rhs, OclExpr::Binary(BinaryOp::Implies, _, _)));
        // not binds tighter than and; navigation tighter than not.
        let e = expr("not self.a and b");
        let OclExpr::Binary(BinaryOp::And, lhs, _) = e else {
            panic!()
        };
        assert_eq!(
            *lhs,
            OclExpr::unary(UnaryOp::Not, OclExpr::SelfRef.nav("a"))
        );
    }

    #[test]
    fn invariant_file() {
        let src = "-- passports\ncontext ProductPassport inv hasCode: self.code <> ''\n\ncontext ProductPassport inv hasStages:\n  self.stages->notEmpty()\n";
        let cs = parse_ocl(src).model.unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(
            cs[0].body,
            OclExpr::binary(
                BinaryOp::Ne,
                OclExpr::SelfRef.nav("code"),
                OclExpr::lit(Value::Str(String::new()))
            )
        );
        assert_eq!(
            cs[1].body,
            OclExpr::SelfRef
                .nav("stages")
                .coll(CollectionOpKind::NotEmpty, None, None)
        );
    }

    #[test]
    fn iterators_and_literals() {
        let e = expr("self.items->forAll(i | i.kind = Kind::BIG and i.w >= -2.5)");
        let OclExpr::CollectionOp {
            op, iterator, body, ..
        } = e
        else {
            panic!()
        };
        assert_eq!(op, CollectionOpKind::ForAll);
        assert_eq!(iterator.as_deref(), Some("i"));
        let text = body.unwrap().to_string();
        assert_eq!(text, "(i.kind = Kind::BIG) and (i.w >= (-2.5))");
        let e = expr("self.items->select(w > 1)->size()");
        assert!(matches!(
            e,
            OclExpr::CollectionOp {
                op: CollectionOpKind::Size,
                ..
            }
        ));
    }

    #[test]
    fn errors_are_located_and_recovered() {
        let r = parse_ocl(
            "context A inv bad: self.\ncontext A inv ok: true\ncontext A inv worse: (1 +\n",
        );
        assert!(r.model.is_none());
        let locs: Vec<_> = r
            .diagnostics
            .iter()
            .map(|d| {
                let l = d.location.as_ref().unwrap();
                (d.code, l.line, l.column)
            })
            .collect();
        assert_eq!(locs, vec![(Code::Syntax, 2, 1), (Code::Syntax, 3, 26)]);
    }

    #[test]
    fn unsupported_operations() {
        assert!(parse_expression("self.stages->select(s | s.oclIsTypeOf(Design))").is_err());
        assert!(parse_expression("self.xs->sortedBy(x | x)").is_err());
        assert!(parse_expression("1 2").is_err());
    }

    #[test]
    fn duplicate_names() {
        let r = parse_ocl("context A inv x: true\ncontext B inv x: false\n");
        assert_eq!(r.diagnostics.len(), 1);
        assert_eq!(r.diagnostics[0].code, Code::DupConstraint);
        assert_eq!(r.diagnostics[0].location.as_ref().unwrap().line, 2);
    }

    #[test]
    fn display_reparses() {
        for src in [
            r"if self.a > 0 then 'x' else 'it\'s' endif",
            "-(3) - -3 * (2 - 1.5e-7)",
            "self.r->collect(x | x.n)->includes(null) implies not false",
        ] {
            let e = expr(src);
            assert_eq!(expr(&e.to_string()), e, "{src}");
        }
    }
}
