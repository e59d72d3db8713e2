//! Query language:
//!
//! ```text
//! query := IDENT "(" [term ("," term)*] ")" ":-" atom ("," atom)* ["."]
//! atom  := IDENT "(" term ("," term)* ")"
//! term  := VAR | "'" chars "'" | INTEGER
//! ```
//!
//! Variables are identifiers starting with a lowercase letter or `_`; a lone
//! `_` is a fresh anonymous variable at each occurrence.

use std::sync::Arc;

use super::{Atom, ConjunctiveQuery, Term};
use crate::error::{Error, Result};
use crate::relation::{Schema, Value};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Quoted(String),
    Int(String),
    LParen,
    RParen,
    Comma,
    Neck,
    Dot,
}

fn lex(text: &str, file: &str) -> Result<Vec<(Tok, usize, usize)>> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let (line, col) = (li + 1, i + 1);
            let c = chars[i];
            let tok = match c {
                '#' | '%' => break,
                c if c.is_whitespace() => {
                    i += 1;
                    continue;
                }
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                ':' if chars.get(i + 1) == Some(&'-') => {
                    i += 1;
                    Tok::Neck
                }
                '\'' => {
                    let start = i + 1;
                    let end = chars[start..]
                        .iter()
                        .position(|&ch| ch == '\'')
                        .ok_or_else(|| Error::syntax(file, line, col, "unterminated constant"))?;
                    i = start + end;
                    Tok::Quoted(chars[start..i].iter().collect())
                }
                c if c.is_ascii_digit() || c == '-' => {
                    let start = i;
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    out.push((Tok::Int(chars[start..i].iter().collect()), line, col));
                    continue;
                }
                c if c.is_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    out.push((Tok::Ident(chars[start..i].iter().collect()), line, col));
                    continue;
                }
                c => return Err(Error::syntax(file, line, col, format!("unexpected {c:?}"))),
            };
            out.push((tok, line, col));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    file: &'a str,
    anon: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self
            .toks
            .get(self.pos)
            .or(self.toks.last())
            .map(|t| (t.1, t.2))
            .unwrap_or((1, 1));
        Error::syntax(self.file, line, col, msg)
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn term(&mut self) -> Result<Term> {
        let t = match self.peek() {
            Some(Tok::Ident(s)) if s == "_" => {
                self.anon += 1;
                Term::Var(format!("_#{}", self.anon))
            }
            Some(Tok::Ident(s)) if s.starts_with(|c: char| c.is_lowercase() || c == '_') => {
                Term::Var(s.clone())
            }
            Some(Tok::Ident(s)) => {
                return Err(self.err(format!(
                    "{s:?}: variables start with a lowercase letter; quote constants"
                )))
            }
            Some(Tok::Quoted(s)) | Some(Tok::Int(s)) => Term::Const(Value::new(s)),
            _ => return Err(self.err("expected a variable or constant")),
        };
        self.pos += 1;
        Ok(t)
    }

    fn terms(&mut self) -> Result<Vec<Term>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut out = Vec::new();
        if self.peek() == Some(&Tok::RParen) {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(self.term()?);
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::RParen) => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return Err(self.err("expected `,` or `)`")),
            }
        }
    }

    fn name(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err("expected a name")),
        }
    }
}

pub(super) fn parse(text: &str, file: &str, schema: &Arc<Schema>) -> Result<ConjunctiveQuery> {
    let mut p = Parser {
        toks: lex(text, file)?,
        pos: 0,
        file,
        anon: 0,
    };
    let name = p.name()?;
    let head = p.terms()?;
    p.expect(Tok::Neck, "`:-`")?;
    let mut atoms = Vec::new();
    loop {
        let at = p.pos;
        let rname = p.name()?;
        let rel = schema.rel_id(&rname).ok_or_else(|| {
            p.pos = at;
            p.err(format!("unknown relation {rname}"))
        })?;
        let mut terms = p.terms()?;
        let rs = schema.relation(rel);
        if terms.len() != rs.arity() {
            p.pos = at;
            return Err(p.err(format!(
                "{rname} has {} attributes, atom has {} terms",
                rs.arity(),
                terms.len()
            )));
        }
        for (t, a) in terms.iter_mut().zip(&rs.attributes) {
            if let Term::Const(Value::Const(raw)) = t {
                let canon = a.domain.canonicalize(raw).map_err(|msg| {
                    p.pos = at;
                    p.err(format!("{rname}.{}: {msg}", a.name))
                })?;
                *t = Term::Const(Value::new(&canon));
            }
        }
        atoms.push(Atom { rel, terms });
        match p.peek() {
            Some(Tok::Comma) => p.pos += 1,
            Some(Tok::Dot) => {
                p.pos += 1;
                break;
            }
            None => break,
            _ => return Err(p.err("expected `,` or end of query")),
        }
    }
    if p.peek().is_some() {
        return Err(p.err("unexpected input after the query"));
    }
    let q = ConjunctiveQuery {
        name,
        head,
        atoms,
        schema: schema.clone(),
    };
    for t in &q.head {
        if let Term::Var(v) = t {
            if v.starts_with("_#") {
                return Err(Error::Query("anonymous variable in the head".into()));
            }
            if !q.atoms.iter().any(|a| a.terms.contains(t)) {
                return Err(Error::Query(format!(
                    "unsafe query: head variable {v} does not occur in the body"
                )));
            }
        }
    }
    Ok(q)
}
