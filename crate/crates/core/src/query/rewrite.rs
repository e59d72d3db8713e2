use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::{join_and_project, unify, AnswerSet, Binding, ConjunctiveQuery, Provenance, Term};
use crate::closure::ta_closure;
use crate::error::{Error, Result};
use crate::md::{classify, match_classes, MdSet};
use crate::relation::{AttrRef, Instance, Position, Value};
use crate::similarity::Transitivity;

/// The strict-majority condition attached to one free variable at a
/// changeable position: the variable's value must occur in the closure block
/// of the witnessing position strictly more often than any other value,
/// counting over every attribute of the variable's match class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountComparison {
    pub position: usize,
    pub var: String,
    /// Name of the existentially quantified variable replacing `var` in the atom.
    pub primed: String,
    pub attr: AttrRef,
    /// The match class of `attr`, over which the counts are summed.
    pub class: Vec<AttrRef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RewrittenAtom {
    Unchanged {
        atom: usize,
    },
    Rewritten {
        atom: usize,
        terms: Vec<Term>,
        comparisons: Vec<CountComparison>,
    },
}

/// Output of the rewrite; depends only on the query and the MDs.
#[derive(Debug, Clone)]
pub struct RewrittenQuery {
    query: ConjunctiveQuery,
    mds: MdSet,
    atoms: Vec<RewrittenAtom>,
}

impl RewrittenQuery {
    pub fn query(&self) -> &ConjunctiveQuery {
        &self.query
    }

    pub fn atoms(&self) -> &[RewrittenAtom] {
        &self.atoms
    }

    /// Whether every atom is left as it was.
    pub fn is_identity(&self) -> bool {
        self.atoms
            .iter()
            .all(|a| matches!(a, RewrittenAtom::Unchanged { .. }))
    }

    fn count_text(&self, out: &mut String, terms: &[Term], c: &CountComparison, other: bool) {
        let schema = self.query.schema();
        let counted = if other {
            format!("{}''", c.var)
        } else {
            c.var.clone()
        };
        let terms: Vec<String> = terms.iter().map(ToString::to_string).collect();
        let sums: Vec<String> = c
            .class
            .iter()
            .map(|&b| {
                let rs = schema.relation(b.rel);
                let vars: Vec<String> = (0..rs.arity())
                    .map(|k| {
                        if k == b.attr {
                            counted.clone()
                        } else {
                            format!("{}'", rs.attributes[k].name.to_lowercase())
                        }
                    })
                    .collect();
                let tuple = vars.join(",");
                let mut s = format!(
                    "Count{{({tuple}) | TA({},{},{tuple},{}) and {}({tuple})",
                    terms.join(","),
                    schema.attr_label(c.attr),
                    schema.attr_label(b),
                    schema.rel_name(b.rel)
                );
                if other {
                    s.push_str(&format!(" and {counted} != {}", c.var));
                }
                s.push('}');
                s
            })
            .collect();
        out.push_str(&sums.join(" + "));
    }
}

impl fmt::Display for RewrittenQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = &self.query;
        let mut parts = Vec::new();
        for a in &self.atoms {
            match a {
                RewrittenAtom::Unchanged { atom } => parts.push(q.atom_text(&q.atoms[*atom])),
                RewrittenAtom::Rewritten {
                    atom,
                    terms,
                    comparisons,
                } => {
                    let rel = q.atoms[*atom].rel;
                    let primed: Vec<&str> = comparisons.iter().map(|c| c.primed.as_str()).collect();
                    let body = super::render_atom(q.schema(), rel, terms.iter().map(ToString::to_string));
                    let mut s = format!("exists {} ({body}", primed.join(","));
                    for c in comparisons {
                        s.push_str(&format!(" and forall {}'' [", c.var));
                        self.count_text(&mut s, terms, c, false);
                        s.push_str(" > ");
                        self.count_text(&mut s, terms, c, true);
                        s.push(']');
                    }
                    s.push(')');
                    parts.push(s);
                }
            }
        }
        write!(f, "{} :- {}", q.head_text().replacen('(', "'(", 1), parts.join(", "))
    }
}

/// Rewrites a UJCQ query for a non-interacting or hit-simple-cyclic MD set.
/// Atoms without a free variable at a changeable position are kept; in every
/// other atom each such variable is replaced by a fresh existential variable
/// and constrained by a strict-majority count over its match class.
pub fn rewrite(q: &ConjunctiveQuery, m: &MdSet) -> Result<RewrittenQuery> {
    let check = super::is_ujcq(q, m);
    if !check.ok {
        return Err(Error::NotUjcq(check.witness.unwrap_or_default()));
    }
    let label = classify(m, &Transitivity::trusting(m.sims())).label;
    if !label.is_fast_eligible() {
        return Err(Error::NotFastEligible(label.to_string()));
    }
    let changeable = m.changeable_attrs();
    let classes = match_classes(m);
    let mut taken: BTreeSet<String> = q
        .atoms
        .iter()
        .flat_map(|a| &a.terms)
        .chain(&q.head)
        .filter_map(|t| match t {
            Term::Var(v) => Some(v.clone()),
            Term::Const(_) => None,
        })
        .collect();
    let mut prime = |v: &str| {
        let mut name = format!("{v}'");
        let mut n = 2;
        while taken.contains(&name) {
            name = format!("{v}'{n}");
            n += 1;
        }
        taken.insert(name.clone());
        name
    };
    let mut atoms = Vec::new();
    for (i, a) in q.atoms.iter().enumerate() {
        let mut terms = a.terms.clone();
        let mut comparisons = Vec::new();
        for (k, t) in a.terms.iter().enumerate() {
            let attr = AttrRef::new(a.rel, k);
            let Term::Var(v) = t else { continue };
            if !q.is_free(v) || !changeable.contains(&attr) {
                continue;
            }
            let primed = prime(v);
            terms[k] = Term::Var(primed.clone());
            comparisons.push(CountComparison {
                position: k,
                var: v.clone(),
                primed,
                attr,
                class: classes
                    .block_of(attr)
                    .map(|b| b.iter().copied().collect())
                    .unwrap_or_else(|| vec![attr]),
            });
        }
        atoms.push(if comparisons.is_empty() {
            RewrittenAtom::Unchanged { atom: i }
        } else {
            RewrittenAtom::Rewritten {
                atom: i,
                terms,
                comparisons,
            }
        });
    }
    Ok(RewrittenQuery {
        query: q.clone(),
        mds: m.clone(),
        atoms,
    })
}

/// Evaluates a rewritten query on `d`. Counts range over tuple positions of the
/// closure block of the witnessing position; a tie for the largest count
/// yields no value.
pub fn eval_rewritten(rq: &RewrittenQuery, d: &Instance) -> AnswerSet {
    let q = &rq.query;
    let ta = ta_closure(d, &rq.mds);
    let empty = HashMap::new();
    let per_atom: Vec<Vec<Binding>> = rq
        .atoms
        .iter()
        .map(|ra| {
            let mut rows: BTreeSet<BTreeMap<String, Value>> = BTreeSet::new();
            match ra {
                RewrittenAtom::Unchanged { atom } => {
                    let a = &q.atoms[*atom];
                    for (_, vals) in d.tuples(a.rel) {
                        if let Some(b) = unify(&a.terms, vals, &empty) {
                            rows.insert(b.into_iter().collect());
                        }
                    }
                }
                RewrittenAtom::Rewritten {
                    atom,
                    terms,
                    comparisons,
                } => {
                    let a = &q.atoms[*atom];
                    'tuples: for (tid, vals) in d.tuples(a.rel) {
                        let Some(mut b) = unify(terms, vals, &empty) else {
                            continue;
                        };
                        for c in comparisons {
                            b.remove(&c.primed);
                            let p = Position::new(a.rel, tid, c.position);
                            let Some(w) = ta.block_of(p).and_then(|blk| ta.strict_winner(blk)) else {
                                continue 'tuples;
                            };
                            match b.get(&c.var) {
                                Some(prev) if prev != w => continue 'tuples,
                                Some(_) => {}
                                None => {
                                    b.insert(c.var.clone(), w.clone());
                                }
                            }
                        }
                        rows.insert(b.into_iter().collect());
                    }
                }
            }
            rows.into_iter().map(|m| m.into_iter().collect()).collect()
        })
        .collect();
    AnswerSet {
        tuples: join_and_project(&q.head, per_atom),
        provenance: Provenance::Rewrite,
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::query::{eval_cq, oracle_answers};
    use crate::relation::{RawRow, Schema};
    use crate::resolve::Bounds;
    use crate::similarity::Similarities;

    fn majority() -> (Instance, MdSet) {
        let s = Arc::new(Schema::parse("relation R(A, B, C)", "s").unwrap());
        let m = MdSet::parse("R[A]=R[A] -> R[B]==R[B]", "m", s.clone(), Arc::new(Similarities::new()))
            .unwrap();
        let rows = [["a1", "b1", "c1"], ["a1", "b2", "c2"], ["a1", "b2", "c3"]];
        let d = Instance::load(s, [("R", rows.iter().map(|r| RawRow::new(*r)).collect())]).unwrap();
        (d, m)
    }

    #[test]
    fn single_atom_shape_and_answers() {
        let (d, m) = majority();
        let q = ConjunctiveQuery::parse("Q(x,y,z) :- R(x,y,z)", d.schema()).unwrap();
        let rq = rewrite(&q, &m).unwrap();
        let text = rq.to_string();
        assert!(text.starts_with("Q'(x,y,z) :- exists y' (R(x,y',z) and forall y'' ["), "{text}");
        assert!(text.contains("Count{(a',y,c') | TA(x,y',z,R[B],a',y,c',R[B]) and R(a',y,c')}"));
        assert!(text.contains("and y'' != y}"));
        let got = eval_rewritten(&rq, &d);
        assert_eq!(got.rows(), [["a1", "b2", "c1"], ["a1", "b2", "c2"], ["a1", "b2", "c3"]]);
        let oracle = oracle_answers(&q, &d, &m, &Bounds::default()).unwrap();
        assert_eq!(got.tuples, oracle.tuples);
    }

    #[test]
    fn no_free_changeable_variable_leaves_the_query_alone() {
        let (d, m) = majority();
        let q = ConjunctiveQuery::parse("Q(x,z) :- R(x,y,z)", d.schema()).unwrap();
        let rq = rewrite(&q, &m).unwrap();
        assert!(rq.is_identity());
        assert_eq!(eval_rewritten(&rq, &d).tuples, eval_cq(&q, &d).tuples);
    }

    #[test]
    fn three_relation_match_class() {
        let s = Arc::new(
            Schema::parse("relation R(A, B, C)\nrelation S(E, F, G)\nrelation U(H, I)", "s").unwrap(),
        );
        let m = MdSet::parse(
            "R[A]=S[E] -> R[B]==S[F]; S[E]=U[H] -> S[F]==U[I]",
            "m",
            s.clone(),
            Arc::new(Similarities::new()),
        )
        .unwrap();
        let q = ConjunctiveQuery::parse("Q(x,y,z) :- R(x,y,z), S(t,u,z), U(p,q)", &s).unwrap();
        let rq = rewrite(&q, &m).unwrap();
        assert!(matches!(rq.atoms()[1], RewrittenAtom::Unchanged { atom: 1 }));
        assert!(matches!(rq.atoms()[2], RewrittenAtom::Unchanged { atom: 2 }));
        let RewrittenAtom::Rewritten { comparisons, .. } = &rq.atoms()[0] else {
            panic!("R atom should be rewritten");
        };
        let class: Vec<String> = comparisons[0].class.iter().map(|&a| s.attr_label(a)).collect();
        assert_eq!(class, ["R[B]", "S[F]", "U[I]"]);
        assert_eq!(rq.to_string().matches("Count{").count(), 6);
    }

    #[test]
    fn ties_give_nothing() {
        let s = Arc::new(Schema::parse("relation R(A, B, C)", "s").unwrap());
        let m = MdSet::parse("R[A]=R[A] -> R[B]==R[B]", "m", s.clone(), Arc::new(Similarities::new()))
            .unwrap();
        let rows = [["a1", "c1", "x"], ["a1", "c2", "y"], ["b1", "c3", "z"], ["b1", "c4", "w"]];
        let d = Instance::load(s.clone(), [("R", rows.iter().map(|r| RawRow::new(*r)).collect())])
            .unwrap();
        let q = ConjunctiveQuery::parse("Q(x,y,z) :- R(x,y,z)", &s).unwrap();
        assert!(eval_rewritten(&rewrite(&q, &m).unwrap(), &d).is_empty());
        assert!(oracle_answers(&q, &d, &m, &Bounds::default()).unwrap().is_empty());
    }

    #[test]
    fn rewrite_is_refused_outside_its_scope() {
        let (d, m) = majority();
        let q = ConjunctiveQuery::parse("Q(x) :- R(x,y,z), R(w,y,v)", d.schema()).unwrap();
        assert!(matches!(rewrite(&q, &m), Err(Error::NotUjcq(_))));
    }
}
