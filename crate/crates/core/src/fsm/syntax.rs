//! Line-oriented machine and scenario files.
//!
//! ```text
//! machine <name>
//! state <name> [action <id>]
//! initial <name>
//! event <name>
//! trans <src> -> <dst> on <event> [when <ocl-expr>]
//! ```
//!
//! A scenario holds one `<event> [key=value ...]` per line, with values in
//! object-model literal syntax. `#` starts a comment in both formats.

use std::fmt::Write as _;

use crate::diagnostic::{has_errors, Code, Diagnostic, SourceSpan};
use crate::model::is_identifier;
use crate::ocl::parse_expression;
use crate::plantuml::lexer::{lex_line, Tok};
use crate::plantuml::{literal_value, Cursor, ParseResult};

use super::{Payload, State, StateMachine, TraceEntry, Transition};

/// Strips a `#` comment, ignoring `#` inside quotes.
fn strip_comment(raw: &str) -> &str {
    let mut quote = None;
    for (i, c) in raw.char_indices() {
        match (quote, c) {
            (None, '#') => return &raw[..i],
            (None, '\'' | '"') => quote = Some(c),
            (Some(q), c) if c == q => quote = None,
            _ => {}
        }
    }
    raw
}

/// Whitespace-separated words with their 1-based char columns and byte offsets.
fn words(line: &str) -> Vec<(usize, usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, c)) in line.char_indices().enumerate() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some((col + 1, byte)),
            (true, Some((sc, sb))) => {
                out.push((sc, sb, &line[sb..byte]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((sc, sb)) = start {
        out.push((sc, sb, &line[sb..]));
    }
    out
}

pub fn parse_machine(text: &str) -> ParseResult<StateMachine> {
    parse_machine_file("<input>", text)
}

pub fn parse_machine_file(file: &str, text: &str) -> ParseResult<StateMachine> {
    let mut m = StateMachine::default();
    let mut diags = Vec::new();
    let mut named = false;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw);
        let ws = words(line);
        let Some(&(kcol, _, keyword)) = ws.first() else {
            continue;
        };
        let err = |col: usize, msg: String| {
            Diagnostic::error(Code::Syntax, msg).at(SourceSpan::new(file, lineno, col))
        };
        let names = |ws: &[(usize, usize, &str)]| -> Result<(), Diagnostic> {
            for &(col, _, w) in ws {
                if !is_identifier(w) {
                    return Err(err(col, format!("`{w}` is not a valid identifier")));
                }
            }
            Ok(())
        };
        let shape = |expected: &str| err(kcol, format!("expected `{expected}`"));
        let result: Result<(), Diagnostic> = (|| {
            match keyword {
                "machine" => {
                    if ws.len() != 2 {
                        return Err(shape("machine <name>"));
                    }
                    if named {
                        return Err(err(kcol, "second `machine` line".into()));
                    }
                    names(&ws[1..])?;
                    m.name = ws[1].2.to_string();
                    named = true;
                }
                "state" => match ws.len() {
                    2 => {
                        names(&ws[1..])?;
                        m.states.push(State::new(ws[1].2));
                    }
                    4 if ws[2].2 == "action" => {
                        names(&ws[1..2])?;
                        names(&ws[3..])?;
                        m.states.push(State::new(ws[1].2).action(ws[3].2));
                    }
                    _ => return Err(shape("state <name> [action <id>]")),
                },
                "initial" => {
                    if ws.len() != 2 {
                        return Err(shape("initial <name>"));
                    }
                    if !m.initial_state.is_empty() {
                        return Err(err(kcol, "second `initial` line".into()));
                    }
                    names(&ws[1..])?;
                    m.initial_state = ws[1].2.to_string();
                }
                "event" => {
                    if ws.len() != 2 {
                        return Err(shape("event <name>"));
                    }
                    names(&ws[1..])?;
                    m.events.push(ws[1].2.to_string());
                }
                "trans" => {
                    let ok = ws.len() >= 6
                        && ws[2].2 == "->"
                        && ws[4].2 == "on"
                        && (ws.len() == 6 || ws[6].2 == "when");
                    if !ok {
                        return Err(shape("trans <src> -> <dst> on <event> [when <guard>]"));
                    }
                    names(&[ws[1], ws[3], ws[5]])?;
                    let mut t = Transition::new(ws[1].2, ws[3].2, ws[5].2);
                    if ws.len() > 6 {
                        let Some(&(gcol, gbyte, _)) = ws.get(7) else {
                            return Err(err(ws[6].0, "`when` needs a guard expression".into()));
                        };
                        let guard = parse_expression(&line[gbyte..]).map_err(|d| {
                            let col = d.location.as_ref().map_or(1, |l| l.column);
                            Diagnostic::error(Code::Syntax, format!("guard: {}", d.message))
                                .at(SourceSpan::new(file, lineno, gcol + col - 1))
                        })?;
                        t = t.when(guard);
                    }
                    m.transitions.push(t);
                }
                other => return Err(err(kcol, format!("unknown declaration `{other}`"))),
            }
            Ok(())
        })();
        if let Err(d) = result {
            diags.push(d);
        }
    }
    if !named && !has_errors(&diags) {
        diags.push(
            Diagnostic::error(Code::Syntax, "missing `machine <name>` line")
                .at(SourceSpan::new(file, 1, 1)),
        );
    }
    let model = (!has_errors(&diags)).then_some(m);
    ParseResult {
        model,
        diagnostics: diags,
    }
}

pub fn parse_scenario(text: &str) -> ParseResult<Vec<(String, Payload)>> {
    parse_scenario_file("<input>", text)
}

pub fn parse_scenario_file(file: &str, text: &str) -> ParseResult<Vec<(String, Payload)>> {
    let mut events = Vec::new();
    let mut diags = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw);
        let err = |col: usize, msg: String| {
            Diagnostic::error(Code::Syntax, msg).at(SourceSpan::new(file, lineno, col))
        };
        let toks = match lex_line(line, lineno) {
            Ok(t) => t,
            Err(e) => {
                diags.push(err(e.col, e.message));
                continue;
            }
        };
        if toks.is_empty() {
            continue;
        }
        let synthetic = crate::plantuml::lexer::Line {
            number: lineno,
            tokens: toks,
        };
        let mut cur = Cursor::new(&synthetic);
        let result: Result<(String, Payload), Diagnostic> = (|| {
            let Some(event) = cur.ident() else {
                return Err(err(
                    cur.col(),
                    format!("expected an event name, found {}", cur.found()),
                ));
            };
            let mut payload = Payload::new();
            while !cur.at_end() {
                let col = cur.col();
                let Some(key) = cur.ident() else {
                    return Err(err(
                        col,
                        format!("expected `key=value`, found {}", cur.found()),
                    ));
                };
                if !cur.eat(&Tok::Eq) {
                    return Err(err(
                        cur.col(),
                        format!("expected `=`, found {}", cur.found()),
                    ));
                }
                let vcol = cur.col();
                let value = match literal_value(&mut cur) {
                    Some(Ok(v)) => v,
                    Some(Err(bare)) => {
                        return Err(err(
                            vcol,
                            format!("bare identifier `{bare}` is not a value; quote strings"),
                        ))
                    }
                    None => {
                        return Err(err(
                            vcol,
                            format!("expected a value, found {}", cur.found()),
                        ))
                    }
                };
                if payload.insert(key.to_string(), value).is_some() {
                    return Err(err(col, format!("key `{key}` given twice")));
                }
            }
            Ok((event.to_string(), payload))
        })();
        match result {
            Ok(e) => events.push(e),
            Err(d) => diags.push(d),
        }
    }
    let model = (!has_errors(&diags)).then_some(events);
    ParseResult {
        model,
        diagnostics: diags,
    }
}

/// One line per entry: `<event> <from> -> <to> [actions]`.
pub fn render_trace(trace: &[TraceEntry]) -> String {
    let mut out = String::new();
    for e in trace {
        let _ = writeln!(out, "{e}");
    }
    out
}
