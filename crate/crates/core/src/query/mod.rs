//! Conjunctive queries: parsing, evaluation, the unchangeable-join check, the
//! counting rewrite and resolved-answer dispatch.

mod parse;
mod rewrite;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

pub use rewrite::{eval_rewritten, rewrite, CountComparison, RewrittenAtom, RewrittenQuery};

use crate::error::{Error, Result};
use crate::md::MdSet;
use crate::relation::{Instance, RelId, Schema, Value};
use crate::resolve::{enumerate_mris_oracle, Bounds};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(Value),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) if v.starts_with("_#") => f.write_str("_"),
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write!(f, "'{c}'"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub rel: RelId,
    pub terms: Vec<Term>,
}

/// `Q(head) :- R1(...), ..., Rn(...)`; body variables missing from the head are
/// existentially quantified.
#[derive(Debug, Clone)]
pub struct ConjunctiveQuery {
    pub name: String,
    pub head: Vec<Term>,
    pub atoms: Vec<Atom>,
    schema: Arc<Schema>,
}

impl ConjunctiveQuery {
    pub fn parse(text: &str, schema: &Arc<Schema>) -> Result<Self> {
        parse::parse(text, "<query>", schema)
    }

    pub fn parse_file(text: &str, file: &str, schema: &Arc<Schema>) -> Result<Self> {
        parse::parse(text, file, schema)
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn free_vars(&self) -> BTreeSet<&str> {
        self.head
            .iter()
            .filter_map(|t| match t {
                Term::Var(v) => Some(v.as_str()),
                Term::Const(_) => None,
            })
            .collect()
    }

    pub fn is_free(&self, v: &str) -> bool {
        self.head.iter().any(|t| matches!(t, Term::Var(x) if x == v))
    }

    /// Body variables that do not occur in the head.
    pub fn bound_vars(&self) -> BTreeSet<&str> {
        self.atoms
            .iter()
            .flat_map(|a| &a.terms)
            .filter_map(|t| match t {
                Term::Var(v) if !self.is_free(v) => Some(v.as_str()),
                _ => None,
            })
            .collect()
    }

    pub fn atom_text(&self, a: &Atom) -> String {
        render_atom(&self.schema, a.rel, a.terms.iter().map(ToString::to_string))
    }

    pub fn head_text(&self) -> String {
        let h: Vec<String> = self.head.iter().map(ToString::to_string).collect();
        format!("{}({})", self.name, h.join(","))
    }
}

impl fmt::Display for ConjunctiveQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.atoms.iter().map(|a| self.atom_text(a)).collect();
        write!(f, "{} :- {}", self.head_text(), body.join(", "))
    }
}

fn render_atom(schema: &Schema, rel: RelId, terms: impl Iterator<Item = String>) -> String {
    let t: Vec<String> = terms.collect();
    format!("{}({})", schema.rel_name(rel), t.join(","))
}

/// Where a set of answers came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Plain,
    Rewrite,
    Oracle,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Plain => "plain",
            Provenance::Rewrite => "rewrite",
            Provenance::Oracle => "oracle",
        })
    }
}

/// Answer tuples in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerSet {
    pub tuples: BTreeSet<Vec<Value>>,
    pub provenance: Provenance,
}

impl AnswerSet {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[&str]) -> bool {
        self.tuples
            .contains(&t.iter().map(|s| Value::new(s)).collect::<Vec<_>>())
    }

    pub fn rows(&self) -> Vec<Vec<String>> {
        self.tuples
            .iter()
            .map(|t| t.iter().map(ToString::to_string).collect())
            .collect()
    }
}

pub(crate) type Binding = HashMap<String, Value>;

/// Extends `b` by matching `terms` against `vals`.
pub(crate) fn unify(terms: &[Term], vals: &[Value], b: &Binding) -> Option<Binding> {
    let mut out = b.clone();
    for (t, v) in terms.iter().zip(vals) {
        match t {
            Term::Const(c) if c != v => return None,
            Term::Const(_) => {}
            Term::Var(x) => match out.get(x) {
                Some(prev) if prev != v => return None,
                Some(_) => {}
                None => {
                    out.insert(x.clone(), v.clone());
                }
            },
        }
    }
    Some(out)
}

/// Joins per-atom binding lists and projects onto the head.
pub(crate) fn join_and_project(head: &[Term], per_atom: Vec<Vec<Binding>>) -> BTreeSet<Vec<Value>> {
    let mut acc: Vec<Binding> = vec![HashMap::new()];
    for rows in per_atom {
        let mut next = Vec::new();
        for b in &acc {
            for r in &rows {
                if r.iter().all(|(k, v)| b.get(k).is_none_or(|x| x == v)) {
                    let mut m = b.clone();
                    m.extend(r.iter().map(|(k, v)| (k.clone(), v.clone())));
                    next.push(m);
                }
            }
        }
        acc = next;
        if acc.is_empty() {
            break;
        }
    }
    acc.iter()
        .map(|b| {
            head.iter()
                .map(|t| match t {
                    Term::Var(v) => b[v].clone(),
                    Term::Const(c) => c.clone(),
                })
                .collect()
        })
        .collect()
}

/// Plain set-semantics evaluation.
pub fn eval_cq(q: &ConjunctiveQuery, d: &Instance) -> AnswerSet {
    let empty = HashMap::new();
    let per_atom = q
        .atoms
        .iter()
        .map(|a| {
            d.tuples(a.rel)
                .filter_map(|(_, vals)| unify(&a.terms, vals, &empty))
                .map(|b| b.into_iter().collect::<BTreeMap<String, Value>>())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .map(|m| m.into_iter().collect())
                .collect()
        })
        .collect();
    AnswerSet {
        tuples: join_and_project(&q.head, per_atom),
        provenance: Provenance::Plain,
    }
}

/// Outcome of the unchangeable-join check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UjcqCheck {
    pub ok: bool,
    /// The first violating term and its position, when `ok` is false.
    pub witness: Option<String>,
}

/// Whether no bound variable that occurs more than once, and no constant,
/// sits at a changeable attribute position.
pub fn is_ujcq(q: &ConjunctiveQuery, m: &MdSet) -> UjcqCheck {
    let changeable = m.changeable_attrs();
    let schema = q.schema();
    let mut occurrences: HashMap<&str, usize> = HashMap::new();
    for t in q.atoms.iter().flat_map(|a| &a.terms) {
        if let Term::Var(v) = t {
            *occurrences.entry(v).or_default() += 1;
        }
    }
    for (i, a) in q.atoms.iter().enumerate() {
        for (k, t) in a.terms.iter().enumerate() {
            let attr = crate::relation::AttrRef::new(a.rel, k);
            if !changeable.contains(&attr) {
                continue;
            }
            let at = format!("{} in atom {} ({})", schema.attr_label(attr), i + 1, q.atom_text(a));
            let witness = match t {
                Term::Const(c) => Some(format!("constant '{c}' at changeable attribute {at}")),
                Term::Var(v) if !q.is_free(v) && occurrences[v.as_str()] > 1 => Some(format!(
                    "bound variable {v} joins at changeable attribute {at}"
                )),
                Term::Var(_) => None,
            };
            if witness.is_some() {
                return UjcqCheck { ok: false, witness };
            }
        }
    }
    UjcqCheck {
        ok: true,
        witness: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Auto,
    Rewrite,
    Oracle,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Mode::Auto),
            "rewrite" => Ok(Mode::Rewrite),
            "oracle" => Ok(Mode::Oracle),
            _ => Err(Error::Config(format!("unknown mode {s:?}"))),
        }
    }
}

/// Answers true in every MRI, by intersecting plain answers over the oracle's
/// MRIs. Tuples holding a placeholder value are never answers.
pub fn oracle_answers(
    q: &ConjunctiveQuery,
    d: &Instance,
    m: &MdSet,
    bounds: &Bounds,
) -> Result<AnswerSet> {
    let r = enumerate_mris_oracle(d, m, bounds)?;
    let mut it = r.mris.iter().map(|x| eval_cq(q, x).tuples);
    let mut acc = it.next().unwrap_or_default();
    for s in it {
        acc.retain(|t| s.contains(t));
    }
    acc.retain(|t| !t.iter().any(Value::is_fresh));
    Ok(AnswerSet {
        tuples: acc,
        provenance: Provenance::Oracle,
    })
}

/// Resolved answers to `q`. `Auto` uses the rewrite when the query is UJCQ and
/// the MD set is non-interacting or hit-simple-cyclic, and the oracle otherwise.
pub fn resolved_answers(
    q: &ConjunctiveQuery,
    d: &Instance,
    m: &MdSet,
    mode: Mode,
    bounds: &Bounds,
) -> Result<AnswerSet> {
    let via_rewrite = || rewrite(q, m).map(|rq| eval_rewritten(&rq, d));
    match mode {
        Mode::Rewrite => via_rewrite(),
        Mode::Oracle => oracle_answers(q, d, m, bounds),
        Mode::Auto => {
            if is_ujcq(q, m).ok && m.classify_on(d).label.is_fast_eligible() {
                via_rewrite()
            } else {
                oracle_answers(q, d, m, bounds)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolve::tests::two_groups;
    use crate::similarity::Similarities;

    fn setup() -> (Arc<Schema>, MdSet) {
        let s = Arc::new(Schema::parse("relation R(A, B)", "s").unwrap());
        let m = MdSet::parse("R[A]=R[A] -> R[B]==R[B]", "m", s.clone(), Arc::new(Similarities::new()))
            .unwrap();
        (s, m)
    }

    #[test]
    fn parsing() {
        let (s, _) = setup();
        let q = ConjunctiveQuery::parse("Q(y) :- R(x,y), R(x,z)", &s).unwrap();
        assert_eq!(q.free_vars(), BTreeSet::from(["y"]));
        assert_eq!(q.bound_vars(), BTreeSet::from(["x", "z"]));
        assert_eq!(q.to_string(), "Q(y) :- R(x,y), R(x,z)");
        let q = ConjunctiveQuery::parse("Q() :- R(_, 'c 1').", &s).unwrap();
        assert_eq!(q.to_string(), "Q() :- R(_,'c 1')");
        assert!(ConjunctiveQuery::parse("Q(w) :- R(x,y)", &s).is_err());
        assert!(ConjunctiveQuery::parse("Q(x) :- R(x)", &s).is_err());
        assert!(ConjunctiveQuery::parse("Q(x) :- T(x)", &s).is_err());
        assert!(ConjunctiveQuery::parse("Q(X) :- R(X,y)", &s).is_err());
        assert!(matches!(
            ConjunctiveQuery::parse("Q(x) :- R(x,'y)", &s),
            Err(Error::Syntax { col: 13, .. })
        ));
    }

    #[test]
    fn plain_evaluation() {
        let (d, _) = two_groups();
        let s = d.schema().clone();
        let q = ConjunctiveQuery::parse("Q(x) :- R(x,y)", &s).unwrap();
        assert_eq!(eval_cq(&q, &d).rows(), [["a1"], ["b1"]]);
        let q = ConjunctiveQuery::parse("Q(y,z) :- R(x,y), R(x,z)", &s).unwrap();
        assert_eq!(eval_cq(&q, &d).len(), 8);
        let q = ConjunctiveQuery::parse("Q() :- R(x,'c9')", &s).unwrap();
        assert!(eval_cq(&q, &d).is_empty());
        let q = ConjunctiveQuery::parse("Q() :- R(x,'c1')", &s).unwrap();
        assert_eq!(eval_cq(&q, &d).len(), 1);
        assert!(eval_cq(&q, &Instance::empty(s)).is_empty());
    }

    #[test]
    fn unchangeable_joins() {
        let (s, m) = setup();
        let check = |t: &str| is_ujcq(&ConjunctiveQuery::parse(t, &s).unwrap(), &m);
        let q1 = check("Q(x,z) :- R(x,y), R(z,y)");
        assert!(!q1.ok);
        assert!(q1.witness.unwrap().contains("bound variable y"));
        assert!(check("Q(y) :- R(x,y), R(x,z)").ok);
        assert!(!check("Q(y) :- R(y,x), R(x,z)").ok);
        assert!(!check("Q(x) :- R(x,'c1')").ok);
        assert!(!check("Q(x) :- R(x,y), R(y,y)").ok);
        assert!(check("Q(x,y) :- R(x,y), R(y,y)").ok);
    }

    #[test]
    fn oracle_and_rewrite_agree_on_example_two_one() {
        let (d, m) = two_groups();
        let s = d.schema().clone();
        for text in ["Q(x,y) :- R(x,y)", "Q(x) :- R(x,y)", "Q() :- R(x,y)"] {
            let q = ConjunctiveQuery::parse(text, &s).unwrap();
            let a = resolved_answers(&q, &d, &m, Mode::Oracle, &Bounds::default()).unwrap();
            let b = resolved_answers(&q, &d, &m, Mode::Rewrite, &Bounds::default()).unwrap();
            assert_eq!(a.tuples, b.tuples, "{text}");
            let auto = resolved_answers(&q, &d, &m, Mode::Auto, &Bounds::default()).unwrap();
            assert_eq!(auto.provenance, Provenance::Rewrite);
        }
        let q = ConjunctiveQuery::parse("Q(x,z) :- R(x,y), R(z,y)", &s).unwrap();
        let auto = resolved_answers(&q, &d, &m, Mode::Auto, &Bounds::default()).unwrap();
        assert_eq!(auto.provenance, Provenance::Oracle);
        assert_eq!(auto.rows(), [["a1", "a1"], ["b1", "b1"]]);
        assert!(matches!(
            resolved_answers(&q, &d, &m, Mode::Rewrite, &Bounds::default()),
            Err(Error::NotUjcq(_))
        ));
    }
}
