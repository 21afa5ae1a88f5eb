//! Text format.
//!
//! ```text
//! fst 1
//! base 2
//! states 1
//! start 0
//! t 0 0 0 0
//! t 0 1 0 1
//! ```
//!
//! After the four header lines come exactly `states * base` transition
//! lines `t <q> <a> <q'> <out>`, where `<out>` is a digit string or `-`
//! for the empty output. `#` starts a comment; blank lines are ignored.

use std::fmt::Write as _;

use super::Fst;
use crate::digits::{format_word, Base};
use crate::error::{Error, Result};

/// Renders a machine with transitions in `(state, symbol)` order.
pub fn format(t: &Fst) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "fst 1");
    let _ = writeln!(s, "base {}", t.base());
    let _ = writeln!(s, "states {}", t.state_count());
    let _ = writeln!(s, "start {}", t.start());
    for q in 0..t.state_count() {
        for a in 0..t.base().get() {
            let out = t.output(q, a);
            let out = if out.is_empty() { "-".to_string() } else { format_word(out) };
            let _ = writeln!(s, "t {} {} {} {}", q, a, t.next_state(q, a), out);
        }
    }
    s
}

struct Token<'a> {
    text: &'a str,
    col: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token { text: &body[s..i], col: s + 1 });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &body[s..], col: s + 1 });
    }
    out
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn number(tok: &Token<'_>, line: usize, what: &str) -> Result<usize> {
    tok.text
        .parse()
        .map_err(|_| syntax(line, tok.col, format!("expected {what}, found {:?}", tok.text)))
}

fn header<'a>(lines: &mut impl Iterator<Item = (usize, Vec<Token<'a>>)>, key: &str, last: usize) -> Result<(usize, Token<'a>)> {
    let (line, toks) = lines
        .next()
        .ok_or_else(|| syntax(last + 1, 1, format!("expected `{key} <n>`, found end of input")))?;
    match toks.as_slice() {
        [k, _] if k.text == key => Ok((line, toks.into_iter().nth(1).expect("two tokens"))),
        [k, ..] => Err(syntax(line, k.col, format!("expected `{key} <n>`"))),
        [] => unreachable!("blank lines are filtered"),
    }
}

pub fn parse(text: &str) -> Result<Fst> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, tokens(l)))
        .filter(|(_, t)| !t.is_empty());

    let (line, version) = header(&mut lines, "fst", 0)?;
    if version.text != "1" {
        return Err(syntax(line, version.col, format!("unsupported version {:?}", version.text)));
    }
    let (line, tok) = header(&mut lines, "base", line)?;
    let b = number(&tok, line, "a base")?;
    let base = Base::new(b.try_into().unwrap_or(u32::MAX))?;
    let (line, tok) = header(&mut lines, "states", line)?;
    let states = number(&tok, line, "a state count")?;
    if states == 0 {
        return Err(syntax(line, tok.col, "a machine needs at least one state"));
    }
    let (line, tok) = header(&mut lines, "start", line)?;
    let start = number(&tok, line, "a state")?;
    if start >= states {
        return Err(Error::StateOutOfRange { line, state: start, states });
    }

    let cells = states * base.size();
    let mut next: Vec<Option<usize>> = vec![None; cells];
    let mut out: Vec<Vec<u8>> = vec![Vec::new(); cells];
    for (line, toks) in lines {
        let [kw, q, a, to, w] = toks.as_slice() else {
            let col = toks.get(5).or(toks.first()).map_or(1, |t| t.col);
            return Err(syntax(line, col, "expected `t <q> <a> <q'> <out>`"));
        };
        if kw.text != "t" {
            return Err(syntax(line, kw.col, format!("unknown directive {:?}", kw.text)));
        }
        let q_id = number(q, line, "a state")?;
        if q_id >= states {
            return Err(Error::StateOutOfRange { line, state: q_id, states });
        }
        let symbol = single_digit(a, line, base)?;
        let to_id = number(to, line, "a state")?;
        if to_id >= states {
            return Err(Error::StateOutOfRange { line, state: to_id, states });
        }
        let emitted = if w.text == "-" {
            Vec::new()
        } else {
            w.text
                .chars()
                .map(|c| match c.to_digit(10) {
                    Some(d) if d < base.get() as u32 => Ok(d as u8),
                    _ => Err(Error::InvalidDigit { digit: c, base: base.get() }),
                })
                .collect::<Result<_>>()?
        };
        let cell = q_id * base.size() + symbol as usize;
        if next[cell].is_some() {
            return Err(Error::DuplicateTransition { line, state: q_id, symbol });
        }
        next[cell] = Some(to_id);
        out[cell] = emitted;
    }

    let next = next
        .into_iter()
        .enumerate()
        .map(|(cell, n)| {
            n.ok_or(Error::MissingTransition {
                state: cell / base.size(),
                symbol: (cell % base.size()) as u8,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Fst::from_tables(base, start, next, out)
}

fn single_digit(tok: &Token<'_>, line: usize, base: Base) -> Result<u8> {
    let mut chars = tok.text.chars();
    match (chars.next().and_then(|c| c.to_digit(10)), chars.next()) {
        (Some(d), None) if d < base.get() as u32 => Ok(d as u8),
        (Some(_), None) => Err(Error::InvalidDigit {
            digit: tok.text.chars().next().unwrap_or('?'),
            base: base.get(),
        }),
        _ => Err(syntax(line, tok.col, format!("expected a digit, found {:?}", tok.text))),
    }
}
