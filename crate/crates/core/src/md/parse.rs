//! Parser for the MD language.
//!
//! ```text
//! mdset := md (";" md)* [";"]
//! md    := [IDENT ":"] cond ("," cond)* "->" match ("," match)*
//! cond  := attr ("~" IDENT | "=") attr
//! match := attr "==" attr
//! attr  := IDENT "[" IDENT "]"
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use super::{Conjunct, MatchPair, Md};
use crate::error::{Error, Result};
use crate::relation::{AttrRef, RelId, Schema};
use crate::similarity::{Similarities, EQUALITY};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LBrack,
    RBrack,
    Tilde,
    Eq,
    EqEq,
    Arrow,
    Comma,
    Semi,
    Colon,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str, file: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, col) = (li + 1, i + 1);
            let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line, col });
            match c {
                '#' => break,
                c if c.is_whitespace() => i += 1,
                '[' => {
                    push(&mut out, Tok::LBrack);
                    i += 1;
                }
                ']' => {
                    push(&mut out, Tok::RBrack);
                    i += 1;
                }
                '~' => {
                    push(&mut out, Tok::Tilde);
                    i += 1;
                }
                ',' => {
                    push(&mut out, Tok::Comma);
                    i += 1;
                }
                ';' => {
                    push(&mut out, Tok::Semi);
                    i += 1;
                }
                ':' => {
                    push(&mut out, Tok::Colon);
                    i += 1;
                }
                '=' if chars.get(i + 1) == Some(&'=') => {
                    push(&mut out, Tok::EqEq);
                    i += 2;
                }
                '=' => {
                    push(&mut out, Tok::Eq);
                    i += 1;
                }
                '-' if chars.get(i + 1) == Some(&'>') => {
                    push(&mut out, Tok::Arrow);
                    i += 2;
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
                }
                c => return Err(Error::syntax(file, line, col, format!("unexpected character {c:?}"))),
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    file: &'a str,
    schema: &'a Schema,
    sims: &'a Similarities,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|s| &s.tok)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let (line, col) = match self.toks.get(self.pos).or(self.toks.last()) {
            Some(s) => (s.line, s.col),
            None => (1, 1),
        };
        Error::syntax(self.file, line, col, msg)
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn attr(&mut self) -> Result<AttrRef> {
        let at = self.pos;
        let rel = self.ident("relation name")?;
        self.expect(Tok::LBrack, "`[`")?;
        let attr = self.ident("attribute name")?;
        self.expect(Tok::RBrack, "`]`")?;
        self.schema.resolve(&rel, &attr).map_err(|e| {
            let s = &self.toks[at];
            Error::syntax(self.file, s.line, s.col, e.to_string())
        })
    }

    fn md(&mut self, ordinal: usize) -> Result<Md> {
        let id = match (self.peek(), self.peek_at(1)) {
            (Some(Tok::Ident(label)), Some(Tok::Colon)) => {
                let label = label.clone();
                self.pos += 2;
                label
            }
            _ => format!("m{ordinal}"),
        };
        let start = self.pos;
        let mut conds = Vec::new();
        loop {
            let l = self.attr()?;
            let sim = match self.peek() {
                Some(Tok::Eq) => {
                    self.pos += 1;
                    self.sims.id(EQUALITY).expect("built-in equality")
                }
                Some(Tok::Tilde) => {
                    self.pos += 1;
                    let name = self.ident("similarity name")?;
                    self.sims.id(&name).ok_or_else(|| {
                        self.err(format!("unknown similarity {name:?}"))
                    })?
                }
                _ => return Err(self.err("expected `=` or `~NAME`")),
            };
            let r = self.attr()?;
            conds.push((l, r, sim));
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::Arrow) => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.err("expected `,` or `->`")),
            }
        }
        let mut matches = Vec::new();
        loop {
            let l = self.attr()?;
            self.expect(Tok::EqEq, "`==`")?;
            let r = self.attr()?;
            matches.push((l, r));
            if self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
            } else {
                break;
            }
        }
        let (left, right) = (conds[0].0.rel, conds[0].1.rel);
        let orient = |l: AttrRef, r: AttrRef| -> Option<(AttrRef, AttrRef)> {
            orient_pair(left, right, l, r)
        };
        let mut lhs = Vec::new();
        for (l, r, sim) in conds {
            let (l, r) = orient(l, r).ok_or_else(|| self.relation_err(start, &id, l, r))?;
            lhs.push(Conjunct { left: l, right: r, sim });
        }
        let mut rhs = Vec::new();
        for (l, r) in matches {
            let (l, r) = orient(l, r).ok_or_else(|| self.relation_err(start, &id, l, r))?;
            rhs.push(MatchPair { left: l, right: r });
        }
        Ok(Md {
            id,
            left,
            right,
            lhs,
            rhs,
        })
    }

    fn relation_err(&self, start: usize, id: &str, l: AttrRef, r: AttrRef) -> Error {
        let s = &self.toks[start];
        Error::syntax(
            self.file,
            s.line,
            s.col,
            format!(
                "{id}: {} and {} do not relate the same relations as the first conjunct",
                self.schema.attr_label(l),
                self.schema.attr_label(r)
            ),
        )
    }
}

fn orient_pair(left: RelId, right: RelId, l: AttrRef, r: AttrRef) -> Option<(AttrRef, AttrRef)> {
    if l.rel == left && r.rel == right {
        Some((l, r))
    } else if l.rel == right && r.rel == left {
        Some((r, l))
    } else {
        None
    }
}

pub(super) fn parse_mds(
    text: &str,
    file: &str,
    schema: &Schema,
    sims: &Similarities,
) -> Result<Vec<Md>> {
    let toks = lex(text, file)?;
    let mut p = Parser {
        toks,
        pos: 0,
        file,
        schema,
        sims,
    };
    let mut out = Vec::new();
    while p.peek().is_some() {
        out.push(p.md(out.len() + 1)?);
        match p.peek() {
            Some(Tok::Semi) => p.pos += 1,
            None => break,
            _ => return Err(p.err("expected `;` between MDs")),
        }
    }
    Ok(out)
}
