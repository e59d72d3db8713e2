//! Datalog rendering of the tuple-attribute closure, with a small parser and a
//! semi-naive evaluator for positive programs.
//!
//! Syntax: one clause per line, terminated by `.`; `%` starts a comment.
//! Variables start with an uppercase letter or `_` (a lone `_` is anonymous);
//! constants are integers, double-quoted strings or lowercase identifiers.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use super::approx_links;
use crate::error::{Error, Result};
use crate::md::MdSet;
use crate::relation::{AttrRef, Instance, Position, Tid};
use crate::unionfind::UnionFind;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Const {
    Int(i64),
    Str(Arc<str>),
}

impl fmt::Display for Const {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const::Int(n) => write!(f, "{n}"),
            Const::Str(s) => write!(f, "{}", quote(s)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Const(Const),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Atom>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub facts: Vec<(String, Vec<Const>)>,
    pub rules: Vec<Rule>,
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn attr_const(m: &MdSet, a: AttrRef) -> String {
    let s = m.schema();
    quote(&format!("{}.{}", s.rel_name(a.rel), s.attr_name(a)))
}

/// Renders the closure program for `d` and `m`: relation facts, one similarity
/// fact per ordered tuple pair satisfying an MD's similarity condition, one `approx`
/// rule per corresponding pair and member of its previous set, and the closure rules.
pub fn emit_datalog(d: &Instance, m: &MdSet) -> String {
    let schema = m.schema();
    let sims = m.sims();
    let g = m.graph();
    let mut out = String::new();
    out.push_str("% tuple-attribute closure\n% relation facts: rel_<R>(tid, values...)\n");
    for (r, rel) in schema.relations().iter().enumerate() {
        for (tid, vals) in d.tuples(r) {
            let args: Vec<String> = vals.iter().map(|v| quote(&v.to_string())).collect();
            let sep = if args.is_empty() { "" } else { ", " };
            let _ = writeln!(out, "rel_{}({tid}{sep}{}).", rel.name, args.join(", "));
        }
    }
    out.push_str("% similarity facts: sim_<md>(X, Y) when X and Y satisfy the MD's left-hand side\n");
    for md in m.mds() {
        for (t1, t2) in md.similar_pairs(sims, d) {
            let _ = writeln!(out, "sim_{}({t1}, {t2}).", md.id);
        }
    }
    out.push_str("% approx rules, one per corresponding pair and previous-set member\n");
    let pattern = |rel: usize, var: &str| {
        let blanks = vec!["_"; schema.relation(rel).arity()];
        if blanks.is_empty() {
            format!("rel_{}({var})", schema.rel_name(rel))
        } else {
            format!("rel_{}({var}, {})", schema.rel_name(rel), blanks.join(", "))
        }
    };
    for (i, mi) in m.mds().iter().enumerate() {
        for j in g.previous_set_of(i) {
            let mj = &m.mds()[j];
            let sim = if (mj.left, mj.right) == (mi.left, mi.right) {
                format!("sim_{}(X, Y)", mj.id)
            } else if (mj.right, mj.left) == (mi.left, mi.right) {
                format!("sim_{}(Y, X)", mj.id)
            } else {
                continue;
            };
            for p in &mi.rhs {
                let _ = writeln!(
                    out,
                    "approx(X, {}, Y, {}) :- {}, {}, {sim}.",
                    attr_const(m, p.left),
                    attr_const(m, p.right),
                    pattern(mi.left, "X"),
                    pattern(mi.right, "Y"),
                );
            }
        }
    }
    out.push_str("% closure rules\n");
    out.push_str("approx(Y, B, X, A) :- approx(X, A, Y, B).\n");
    out.push_str("ta(X, A, Y, B) :- approx(X, A, Y, B).\n");
    out.push_str("ta(X, A, Z, C) :- ta(X, A, Y, B), approx(Y, B, Z, C).\n");
    out
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    file: &'a str,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Str(String),
    Int(i64),
    LParen,
    RParen,
    Comma,
    Dot,
    Neck,
}

impl Lexer<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::syntax(self.file, self.line, self.col, msg)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn next(&mut self) -> Result<Option<(Tok, usize, usize)>> {
        loop {
            match self.chars.get(self.pos) {
                Some('%') => {
                    while !matches!(self.chars.get(self.pos), None | Some('\n')) {
                        self.bump();
                    }
                }
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                _ => break,
            }
        }
        let (line, col) = (self.line, self.col);
        let Some(c) = self.bump() else {
            return Ok(None);
        };
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            ':' if self.chars.get(self.pos) == Some(&'-') => {
                self.bump();
                Tok::Neck
            }
            '"' => {
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.err("unterminated string")),
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some(e) => s.push(e),
                            None => return Err(self.err("unterminated string")),
                        },
                        Some(ch) => s.push(ch),
                    }
                }
                Tok::Str(s)
            }
            c if c.is_ascii_digit() || c == '-' => {
                let mut s = c.to_string();
                while let Some(d) = self.chars.get(self.pos).filter(|d| d.is_ascii_digit()) {
                    s.push(*d);
                    self.bump();
                }
                Tok::Int(s.parse().map_err(|_| self.err(format!("bad integer {s:?}")))?)
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = c.to_string();
                while let Some(d) = self
                    .chars
                    .get(self.pos)
                    .filter(|d| d.is_alphanumeric() || **d == '_')
                {
                    s.push(*d);
                    self.bump();
                }
                if c.is_uppercase() || c == '_' {
                    Tok::Var(s)
                } else {
                    Tok::Ident(s)
                }
            }
            c => return Err(Error::syntax(self.file, line, col, format!("unexpected {c:?}"))),
        };
        Ok(Some((tok, line, col)))
    }
}

/// Parses a positive Datalog program.
pub fn parse_program(text: &str, file: &str) -> Result<Program> {
    let mut lx = Lexer {
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
        file,
    };
    let mut toks = Vec::new();
    while let Some(t) = lx.next()? {
        toks.push(t);
    }
    let mut i = 0;
    let mut anon = 0;
    let mut program = Program::default();
    let err_at = |i: usize, msg: &str| {
        let (line, col) = toks
            .get(i)
            .or(toks.last())
            .map(|t| (t.1, t.2))
            .unwrap_or((1, 1));
        Error::syntax(file, line, col, msg)
    };
    let mut atom = |i: &mut usize| -> Result<Atom> {
        let pred = match toks.get(*i).map(|t| &t.0) {
            Some(Tok::Ident(p)) => p.clone(),
            _ => return Err(err_at(*i, "expected predicate name")),
        };
        *i += 1;
        let mut args = Vec::new();
        if toks.get(*i).map(|t| &t.0) == Some(&Tok::LParen) {
            *i += 1;
            loop {
                let term = match toks.get(*i).map(|t| &t.0) {
                    Some(Tok::Var(v)) if v == "_" => {
                        anon += 1;
                        Term::Var(format!("_{anon}"))
                    }
                    Some(Tok::Var(v)) => Term::Var(v.clone()),
                    Some(Tok::Str(s)) => Term::Const(Const::Str(Arc::from(s.as_str()))),
                    Some(Tok::Int(n)) => Term::Const(Const::Int(*n)),
                    Some(Tok::Ident(s)) => Term::Const(Const::Str(Arc::from(s.as_str()))),
                    _ => return Err(err_at(*i, "expected a term")),
                };
                args.push(term);
                *i += 1;
                match toks.get(*i).map(|t| &t.0) {
                    Some(Tok::Comma) => *i += 1,
                    Some(Tok::RParen) => {
                        *i += 1;
                        break;
                    }
                    _ => return Err(err_at(*i, "expected `,` or `)`")),
                }
            }
        }
        Ok(Atom { pred, args })
    };
    while i < toks.len() {
        let start = i;
        let head = atom(&mut i)?;
        match toks.get(i).map(|t| &t.0) {
            Some(Tok::Dot) => {
                i += 1;
                let mut vals = Vec::new();
                for t in head.args {
                    match t {
                        Term::Const(c) => vals.push(c),
                        Term::Var(_) => return Err(err_at(start, "facts must be ground")),
                    }
                }
                program.facts.push((head.pred, vals));
            }
            Some(Tok::Neck) => {
                i += 1;
                let mut body = vec![atom(&mut i)?];
                loop {
                    match toks.get(i).map(|t| &t.0) {
                        Some(Tok::Comma) => {
                            i += 1;
                            body.push(atom(&mut i)?);
                        }
                        Some(Tok::Dot) => {
                            i += 1;
                            break;
                        }
                        _ => return Err(err_at(i, "expected `,` or `.`")),
                    }
                }
                let bound: HashSet<&String> = body
                    .iter()
                    .flat_map(|a| &a.args)
                    .filter_map(|t| match t {
                        Term::Var(v) => Some(v),
                        Term::Const(_) => None,
                    })
                    .collect();
                for t in &head.args {
                    if let Term::Var(v) = t {
                        if !bound.contains(v) {
                            return Err(err_at(start, &format!("unsafe rule: {v} not in body")));
                        }
                    }
                }
                program.rules.push(Rule { head, body });
            }
            _ => return Err(err_at(i, "expected `.` or `:-`")),
        }
    }
    Ok(program)
}

/// Relations of a Datalog model.
pub type Model = HashMap<String, HashSet<Vec<Const>>>;

type Binding = HashMap<String, Const>;

fn matches(atom: &Atom, tuple: &[Const], b: &Binding) -> Option<Binding> {
    if atom.args.len() != tuple.len() {
        return None;
    }
    let mut out = b.clone();
    for (t, c) in atom.args.iter().zip(tuple) {
        match t {
            Term::Const(k) if k != c => return None,
            Term::Const(_) => {}
            Term::Var(v) => match out.get(v) {
                Some(prev) if prev != c => return None,
                Some(_) => {}
                None => {
                    out.insert(v.clone(), c.clone());
                }
            },
        }
    }
    Some(out)
}

/// Index of a relation on its first column.
type FirstCol<'a> = HashMap<&'a Const, Vec<&'a Vec<Const>>>;

fn index(rel: &HashSet<Vec<Const>>) -> FirstCol<'_> {
    let mut idx: FirstCol = HashMap::new();
    for t in rel {
        if let Some(k) = t.first() {
            idx.entry(k).or_default().push(t);
        }
    }
    idx
}

fn join(
    body: &[Atom],
    sources: &[(&HashSet<Vec<Const>>, Option<&FirstCol>)],
    b: Binding,
    out: &mut Vec<Binding>,
) {
    let Some((atom, rest)) = body.split_first() else {
        out.push(b);
        return;
    };
    let (rel, idx) = sources[0];
    let first = atom.args.first().and_then(|t| match t {
        Term::Const(c) => Some(c.clone()),
        Term::Var(v) => b.get(v).cloned(),
    });
    let mut step = |t: &Vec<Const>| {
        if let Some(nb) = matches(atom, t, &b) {
            join(rest, &sources[1..], nb, out);
        }
    };
    match (first, idx) {
        (Some(k), Some(idx)) => {
            for t in idx.get(&k).into_iter().flatten() {
                step(t);
            }
        }
        _ => rel.iter().for_each(step),
    }
}

/// Computes the least model of a positive program by semi-naive iteration.
pub fn evaluate(program: &Program) -> Model {
    let mut db: Model = HashMap::new();
    for (p, vals) in &program.facts {
        db.entry(p.clone()).or_default().insert(vals.clone());
    }
    let empty = HashSet::new();
    let mut delta = db.clone();
    while delta.values().any(|r| !r.is_empty()) {
        let full_idx: HashMap<&String, FirstCol> = db.iter().map(|(k, v)| (k, index(v))).collect();
        let delta_idx: HashMap<&String, FirstCol> =
            delta.iter().map(|(k, v)| (k, index(v))).collect();
        let mut derived: Model = HashMap::new();
        for rule in &program.rules {
            for k in 0..rule.body.len() {
                let Some(d) = delta.get(&rule.body[k].pred).filter(|d| !d.is_empty()) else {
                    continue;
                };
                let sources: Vec<_> = rule
                    .body
                    .iter()
                    .enumerate()
                    .map(|(n, a)| {
                        if n == k {
                            (d, delta_idx.get(&a.pred))
                        } else {
                            (db.get(&a.pred).unwrap_or(&empty), full_idx.get(&a.pred))
                        }
                    })
                    .collect();
                let mut bindings = Vec::new();
                join(&rule.body, &sources, HashMap::new(), &mut bindings);
                for b in bindings {
                    let tuple: Vec<Const> = rule
                        .head
                        .args
                        .iter()
                        .map(|t| match t {
                            Term::Const(c) => c.clone(),
                            Term::Var(v) => b[v].clone(),
                        })
                        .collect();
                    if !db.get(&rule.head.pred).is_some_and(|r| r.contains(&tuple)) {
                        derived.entry(rule.head.pred.clone()).or_default().insert(tuple);
                    }
                }
            }
        }
        drop(full_idx);
        drop(delta_idx);
        for (p, ts) in &derived {
            db.entry(p.clone()).or_default().extend(ts.iter().cloned());
        }
        delta = derived;
    }
    db
}

/// Evaluates an emitted closure program and reads its `ta` relation back as a
/// partition of the positions it links. Singleton classes are dropped.
pub fn ta_blocks_from_program(text: &str, d: &Instance) -> Result<Vec<Vec<Position>>> {
    let program = parse_program(text, "<datalog>")?;
    let model = evaluate(&program);
    let schema = d.schema();
    let mut owner: BTreeMap<Tid, usize> = BTreeMap::new();
    for r in 0..schema.relations().len() {
        for (tid, _) in d.tuples(r) {
            owner.insert(tid, r);
        }
    }
    let position = |tid: &Const, attr: &Const| -> Result<Position> {
        let (Const::Int(t), Const::Str(a)) = (tid, attr) else {
            return Err(Error::Query(format!("malformed ta fact over {tid}, {attr}")));
        };
        let tid = Tid(*t as u64);
        let (rel, name) = a
            .split_once('.')
            .ok_or_else(|| Error::Query(format!("malformed attribute {a}")))?;
        let a = schema.resolve(rel, name)?;
        match owner.get(&tid) {
            Some(&r) if r == a.rel => Ok(Position::new(r, tid, a.attr)),
            _ => Err(Error::Query(format!("tuple {tid} is not in {rel}"))),
        }
    };
    let mut uf = UnionFind::new();
    for fact in model.get("ta").into_iter().flatten() {
        if let [t1, a1, t2, a2] = fact.as_slice() {
            uf.union(position(t1, a1)?, position(t2, a2)?);
        }
    }
    Ok(uf.classes().into_iter().filter(|b| b.len() > 1).collect())
}

/// The `≈′` pairs as they would be derived by the emitted program's `approx` rules.
pub fn approx_pairs(d: &Instance, m: &MdSet) -> Vec<(Position, Position)> {
    approx_links(d, m)
}
