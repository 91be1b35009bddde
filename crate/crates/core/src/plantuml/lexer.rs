//! Line-aware tokenizer shared by the class-model, object-model and
//! scenario syntaxes.

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    /// `@startuml`, `@enduml`, ... (text without the `@`).
    Directive(String),
    Str(String),
    Int(i64),
    Float(f64),
    /// `--`, `*--`, `<|--`, or any other arrow-like run such as `-->`.
    Arrow(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    ColonColon,
    Eq,
    Dot,
    Comma,
    Plus,
    Minus,
    Hash,
    Stereo,
    Other(char),
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Directive(s) => format!("`@{s}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Int(i) => format!("number `{i}`"),
            Tok::Float(x) => format!("number `{x}`"),
            Tok::Arrow(a) => format!("`{a}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Colon => "`:`".into(),
            Tok::ColonColon => "`::`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Hash => "`#`".into(),
            Tok::Stereo => "`<<`".into(),
            Tok::Other(c) => format!("`{c}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LexError {
    pub message: String,
    pub line: usize,
    pub col: usize,
}

/// A non-empty source line after comment stripping.
#[derive(Debug, Clone)]
pub(crate) struct Line {
    pub number: usize,
    pub tokens: Vec<Token>,
}

const ARROW_CHARS: &[char] = &['-', '.', '<', '>', '|', '*'];

/// Splits `text` into token lines. `'` starts a comment running to the end
/// of the line (outside string literals). Lines that lex with errors are
/// reported and dropped.
pub(crate) fn lex_lines(text: &str) -> (Vec<Line>, Vec<LexError>) {
    let mut lines = Vec::new();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        match lex_line(raw, i + 1) {
            Ok(tokens) if tokens.is_empty() => {}
            Ok(tokens) => lines.push(Line {
                number: i + 1,
                tokens,
            }),
            Err(e) => errors.push(e),
        }
    }
    (lines, errors)
}

pub(crate) fn lex_line(raw: &str, line: usize) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = raw.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, message: String| LexError { message, line, col };
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let push = |out: &mut Vec<Token>, tok: Tok| out.push(Token { tok, line, col });
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '\'' {
            break;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
            continue;
        }
        if c == '@' {
            let start = i + 1;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            push(&mut out, Tok::Directive(chars[start..i].iter().collect()));
            continue;
        }
        if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err(err(col, "unterminated string literal".into())),
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => {
                        let esc = chars.get(i + 1).copied();
                        s.push(match esc {
                            Some('"') => '"',
                            Some('\\') => '\\',
                            Some('n') => '\n',
                            Some('t') => '\t',
                            _ => return Err(err(i + 1, "invalid escape in string literal".into())),
                        });
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            push(&mut out, Tok::Str(s));
            continue;
        }
        let starts_number = c.is_ascii_digit()
            || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()));
        if starts_number {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let mut is_float = false;
            if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                is_float = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if matches!(chars.get(i), Some('e' | 'E')) {
                let mut j = i + 1;
                if matches!(chars.get(j), Some('+' | '-')) {
                    j += 1;
                }
                if chars.get(j).is_some_and(|d| d.is_ascii_digit()) {
                    is_float = true;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let tok = if is_float {
                text.parse()
                    .map(Tok::Float)
                    .map_err(|_| err(col, format!("invalid number `{text}`")))?
            } else {
                text.parse()
                    .map(Tok::Int)
                    .map_err(|_| err(col, format!("integer `{text}` out of range")))?
            };
            push(&mut out, tok);
            continue;
        }
        if ARROW_CHARS.contains(&c) {
            let start = i;
            while i < chars.len() && ARROW_CHARS.contains(&chars[i]) {
                i += 1;
            }
            let run: String = chars[start..i].iter().collect();
            let tok = match run.as_str() {
                "-" => Tok::Minus,
                "." => Tok::Dot,
                "<<" => Tok::Stereo,
                _ if run.contains("--") || run.contains("..") => Tok::Arrow(run),
                _ => Tok::Other(c),
            };
            push(&mut out, tok);
            continue;
        }
        let tok = match c {
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ':' if chars.get(i + 1) == Some(&':') => {
                i += 1;
                Tok::ColonColon
            }
            ':' => Tok::Colon,
            '=' => Tok::Eq,
            ',' => Tok::Comma,
            '+' => Tok::Plus,
            '#' => Tok::Hash,
            other => Tok::Other(other),
        };
        push(&mut out, tok);
        i += 1;
    }
    Ok(out)
}
