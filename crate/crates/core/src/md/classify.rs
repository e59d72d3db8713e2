//! Syntactic tractability classification of MD sets.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::{Md, MdGraph, MdSet};
use crate::error::{Error, Result};
use crate::relation::{AttrRef, Schema};
use crate::similarity::Transitivity;
use crate::unionfind::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Label {
    NonInteracting,
    SimpleCycle,
    HitSimpleCycle,
    LinearPairEasy,
    LinearPairHard,
    Unknown,
}

impl Label {
    /// Labels for which minimally resolved instances are characterized by the
    /// tuple-attribute closure.
    pub fn is_fast_eligible(self) -> bool {
        matches!(
            self,
            Label::NonInteracting | Label::SimpleCycle | Label::HitSimpleCycle
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::NonInteracting => "NonInteracting",
            Label::SimpleCycle => "SimpleCycle",
            Label::HitSimpleCycle => "HitSimpleCycle",
            Label::LinearPairEasy => "LinearPairEasy",
            Label::LinearPairHard => "LinearPairHard",
            Label::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which relation of a linear pair an attribute belongs to: the first (`R`) or
/// second (`S`) relation of `m1`. For MDs over a single relation the two sides are
/// treated as two copies of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    R,
    S,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::R => "R",
            Side::S => "S",
        })
    }
}

/// One piece of structured justification for a classification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// A fact about the MD-graph or the syntactic shape of the MDs.
    Shape { detail: String },
    /// Outcome of one clause of the linear-pair easiness condition.
    Clause {
        side: Side,
        clause: &'static str,
        holds: bool,
        witness: String,
    },
    /// Checked transitivity of a similarity used by the MDs.
    Transitivity {
        similarity: String,
        declared: bool,
        transitive: bool,
        violations: Vec<[String; 3]>,
    },
    /// A hypothesis the verdict relies on that is not verified.
    Assumption { detail: String },
    /// A precondition of a hardness or easiness result.
    Precondition {
        name: String,
        holds: bool,
        detail: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub label: Label,
    pub evidence: Vec<Evidence>,
}

impl Classification {
    /// Clause outcomes `(side, clause, holds)`, in evaluation order.
    pub fn clauses(&self) -> Vec<(Side, &'static str, bool)> {
        self.evidence
            .iter()
            .filter_map(|e| match e {
                Evidence::Clause {
                    side, clause, holds, ..
                } => Some((*side, *clause, *holds)),
                _ => None,
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("label: {}\n", self.label);
        for e in &self.evidence {
            let line = match e {
                Evidence::Shape { detail } => format!("shape: {detail}"),
                Evidence::Clause {
                    side,
                    clause,
                    holds,
                    witness,
                } => format!(
                    "clause ({}) ({clause}) {}: {witness}",
                    if *side == Side::R { "a" } else { "b" },
                    if *holds { "holds" } else { "fails" }
                ),
                Evidence::Transitivity {
                    similarity,
                    declared,
                    transitive,
                    violations,
                } => format!(
                    "similarity {similarity}: declared transitive {declared}, checked {transitive}{}",
                    violations
                        .first()
                        .map(|[x, y, z]| format!(" (e.g. {x} ~ {y} ~ {z})"))
                        .unwrap_or_default()
                ),
                Evidence::Assumption { detail } => format!("assumption: {detail}"),
                Evidence::Precondition {
                    name,
                    holds,
                    detail,
                } => format!(
                    "precondition {name} {}: {detail}",
                    if *holds { "holds" } else { "fails" }
                ),
            };
            out.push_str("  ");
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionRole {
    LComponent,
    RComponent,
    EquivalentSet,
    MatchClass,
}

/// A partition of attributes into disjoint blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttrPartition {
    pub role: PartitionRole,
    pub blocks: Vec<BTreeSet<AttrRef>>,
}

impl AttrPartition {
    fn from_classes(role: PartitionRole, mut uf: UnionFind<AttrRef>) -> Self {
        AttrPartition {
            role,
            blocks: uf
                .classes()
                .into_iter()
                .map(|c| c.into_iter().collect())
                .collect(),
        }
    }

    pub fn block_of(&self, a: AttrRef) -> Option<&BTreeSet<AttrRef>> {
        self.blocks.iter().find(|b| b.contains(&a))
    }

    pub fn labels(&self, schema: &Schema) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&a| schema.attr_label(a)).collect())
            .collect()
    }
}

/// L-components and R-components of one MD.
pub fn lr_components(md: &Md) -> (AttrPartition, AttrPartition) {
    let mut l = UnionFind::new();
    for c in &md.lhs {
        l.union(c.left, c.right);
    }
    let mut r = UnionFind::new();
    for p in &md.rhs {
        r.union(p.left, p.right);
    }
    (
        AttrPartition::from_classes(PartitionRole::LComponent, l),
        AttrPartition::from_classes(PartitionRole::RComponent, r),
    )
}

/// Classes of the reflexive-transitive closure of `≐_r` over changeable attributes.
pub fn match_classes(m: &MdSet) -> AttrPartition {
    let mut uf = UnionFind::new();
    for md in m.mds() {
        for p in &md.rhs {
            uf.union(p.left, p.right);
        }
    }
    AttrPartition::from_classes(PartitionRole::MatchClass, uf)
}

/// An equivalent set of a linear pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalentSet {
    pub side: Side,
    pub attrs: BTreeSet<AttrRef>,
    pub bound: bool,
}

impl EquivalentSet {
    pub fn label(&self, schema: &Schema) -> String {
        let names: Vec<String> = self.attrs.iter().map(|&a| schema.attr_label(a)).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// Equivalent sets of a linear pair, for both relations, with their bound flags.
pub fn equivalent_sets(m: &MdSet) -> Result<Vec<EquivalentSet>> {
    let (i1, i2) = linear_pair(&m.graph())
        .ok_or_else(|| Error::NotLinearPair("the MD-graph is not a single edge".into()))?;
    let pair = Pair::new(&m.mds()[i1], &m.mds()[i2]).ok_or_else(|| {
        Error::NotLinearPair("the two MDs do not relate the same two relations".into())
    })?;
    let mut out = pair.equivalent_sets(Side::R, &|_| true);
    out.extend(pair.equivalent_sets(Side::S, &|_| true));
    Ok(out)
}

/// The unique edge `(m1, m2)` if the graph has two vertices and exactly that edge.
fn linear_pair(g: &MdGraph) -> Option<(usize, usize)> {
    match g.edges().as_slice() {
        [(a, b)] if g.len() == 2 && a != b => Some((*a, *b)),
        _ => None,
    }
}

type SideAttr = (Side, AttrRef);

/// A linear pair with `m2` oriented to read over the same relations as `m1`.
struct Pair {
    m1: Md,
    m2: Md,
}

impl Pair {
    fn new(m1: &Md, m2: &Md) -> Option<Pair> {
        Some(Pair {
            m1: m1.clone(),
            m2: m2.oriented(m1.left, m1.right)?,
        })
    }

    fn lhs(md: &Md) -> BTreeSet<SideAttr> {
        md.lhs
            .iter()
            .flat_map(|c| [(Side::R, c.left), (Side::S, c.right)])
            .collect()
    }

    fn rhs(md: &Md) -> BTreeSet<SideAttr> {
        md.rhs
            .iter()
            .flat_map(|p| [(Side::R, p.left), (Side::S, p.right)])
            .collect()
    }

    /// L-components of `md`, linking only through conjuncts accepted by `link`.
    fn l_components(md: &Md, link: &dyn Fn(usize) -> bool) -> Vec<Vec<SideAttr>> {
        let mut uf = UnionFind::new();
        for c in &md.lhs {
            uf.add((Side::R, c.left));
            uf.add((Side::S, c.right));
            if link(c.sim) {
                uf.union((Side::R, c.left), (Side::S, c.right));
            }
        }
        uf.classes()
    }

    fn r_components(md: &Md) -> Vec<Vec<SideAttr>> {
        let mut uf = UnionFind::new();
        for p in &md.rhs {
            uf.union((Side::R, p.left), (Side::S, p.right));
        }
        uf.classes()
    }

    fn equivalent_sets(&self, side: Side, link: &dyn Fn(usize) -> bool) -> Vec<EquivalentSet> {
        let lhs1 = Self::lhs(&self.m1);
        let lhs2 = Self::lhs(&self.m2);
        let mut uf: UnionFind<AttrRef> = UnionFind::new();
        for &(s, a) in Self::rhs(&self.m1).union(&lhs2) {
            if s == side {
                uf.add(a);
            }
        }
        let comps = Self::r_components(&self.m1)
            .into_iter()
            .chain(Self::l_components(&self.m2, link));
        for comp in comps {
            let members: Vec<AttrRef> = comp
                .into_iter()
                .filter(|(s, _)| *s == side)
                .map(|(_, a)| a)
                .collect();
            for w in members.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        uf.classes()
            .into_iter()
            .filter(|c| c.iter().any(|&a| lhs2.contains(&(side, a))))
            .map(|c| EquivalentSet {
                side,
                bound: c.iter().any(|&a| lhs1.contains(&(side, a))),
                attrs: c.into_iter().collect(),
            })
            .collect()
    }

    /// Evaluates clauses (i)-(iii) for one side; returns whether any holds.
    fn side_condition(
        &self,
        side: Side,
        schema: &Schema,
        link: &dyn Fn(usize) -> bool,
        evidence: &mut Vec<Evidence>,
    ) -> bool {
        let label = |a: &AttrRef| schema.attr_label(*a);
        let lhs2 = Self::lhs(&self.m2);

        let shared: Vec<String> = Self::rhs(&self.m1)
            .intersection(&lhs2)
            .filter(|(s, _)| *s == side)
            .map(|(_, a)| label(a))
            .collect();
        let i = shared.is_empty();
        evidence.push(Evidence::Clause {
            side,
            clause: "i",
            holds: i,
            witness: if i {
                format!("no attribute of {side} in RHS(m1) ∩ LHS(m2)")
            } else {
                format!("RHS(m1) ∩ LHS(m2) contains {}", shared.join(", "))
            },
        });

        let ess = self.equivalent_sets(side, link);
        let ii = ess.iter().all(|e| e.bound);
        let described: Vec<String> = ess
            .iter()
            .map(|e| {
                format!(
                    "{} {}",
                    e.label(schema),
                    if e.bound { "bound" } else { "not bound" }
                )
            })
            .collect();
        evidence.push(Evidence::Clause {
            side,
            clause: "ii",
            holds: ii,
            witness: if described.is_empty() {
                format!("no ES of {side}")
            } else {
                described.join("; ")
            },
        });

        let comps = Self::l_components(&self.m1, &|_| true);
        let uncovered = comps
            .iter()
            .find(|comp| !comp.iter().any(|x| x.0 == side && lhs2.contains(x)));
        let iii = uncovered.is_none();
        evidence.push(Evidence::Clause {
            side,
            clause: "iii",
            holds: iii,
            witness: match uncovered {
                None => format!("every L-component of m1 has an attribute of {side} in LHS(m2)"),
                Some(comp) => {
                    let names: Vec<String> = comp.iter().map(|(_, a)| label(a)).collect();
                    format!(
                        "no attribute of {side} in L-component {{{}}} belongs to LHS(m2)",
                        names.join(",")
                    )
                }
            },
        });
        i || ii || iii
    }
}

/// Classifies an MD set as non-interacting, simple-cycle, hit-simple-cyclic, an
/// easy or hard linear pair, or unknown.
pub fn classify(m: &MdSet, checked: &Transitivity) -> Classification {
    let g = m.graph();
    let mut evidence = Vec::new();
    if g.is_edgeless() {
        evidence.push(Evidence::Shape {
            detail: "the MD-graph has no edges".into(),
        });
        return Classification {
            label: Label::NonInteracting,
            evidence,
        };
    }

    let same = same_attribute_violation(m);
    let single = changeable_lhs_violation(m);
    let shape_ok = same.is_none() && single.is_none();
    if let Some(w) = &same {
        evidence.push(Evidence::Shape {
            detail: format!("corresponding attributes differ: {w}"),
        });
    }
    if let Some(w) = &single {
        evidence.push(Evidence::Shape {
            detail: format!("more than one changeable LHS attribute: {w}"),
        });
    }

    if g.is_single_cycle() {
        evidence.push(Evidence::Shape {
            detail: "the MD-graph is a single cycle".into(),
        });
        if shape_ok {
            return Classification {
                label: Label::SimpleCycle,
                evidence,
            };
        }
    } else if let Some(v) = (0..g.len()).find(|&v| !hit_cycle(&g, v)) {
        evidence.push(Evidence::Shape {
            detail: format!(
                "{} is neither on a cycle nor has an edge into one",
                g.id(v)
            ),
        });
    } else {
        evidence.push(Evidence::Shape {
            detail: "every MD is on a cycle or has an edge into a cycle".into(),
        });
        if shape_ok {
            return Classification {
                label: Label::HitSimpleCycle,
                evidence,
            };
        }
    }

    let Some((i1, i2)) = linear_pair(&g) else {
        evidence.push(Evidence::Shape {
            detail: "not a linear pair: the MD-graph is not a single edge between two MDs".into(),
        });
        return Classification {
            label: Label::Unknown,
            evidence,
        };
    };
    evidence.clear();
    evidence.push(Evidence::Shape {
        detail: format!("linear pair {} -> {}", g.id(i1), g.id(i2)),
    });
    let Some(pair) = Pair::new(&m.mds()[i1], &m.mds()[i2]) else {
        evidence.push(Evidence::Shape {
            detail: "the two MDs do not relate the same two relations".into(),
        });
        return Classification {
            label: Label::Unknown,
            evidence,
        };
    };

    let sims: BTreeSet<usize> = pair
        .m1
        .lhs
        .iter()
        .chain(&pair.m2.lhs)
        .map(|c| c.sim)
        .collect();
    for &s in &sims {
        let t = &checked.entries[s];
        evidence.push(Evidence::Transitivity {
            similarity: t.name.clone(),
            declared: t.declared,
            transitive: t.transitive,
            violations: t
                .violations
                .iter()
                .take(3)
                .map(|(x, y, z)| [x.to_string(), y.to_string(), z.to_string()])
                .collect(),
        });
    }
    let all_transitive = sims.iter().all(|&s| checked.is_transitive(s));

    // Similarity conditions of m2 only force values together through transitive similarities.
    let link = |s: usize| checked.is_transitive(s);
    let schema = m.schema();
    let a = pair.side_condition(Side::R, schema, &link, &mut evidence);
    let b = pair.side_condition(Side::S, schema, &link, &mut evidence);

    let shared_rhs: Vec<String> = pair
        .m1
        .rhs_attrs()
        .intersection(&pair.m2.rhs_attrs())
        .map(|&x| schema.attr_label(x))
        .collect();
    let disjoint = shared_rhs.is_empty();

    let label = if a && b {
        evidence.push(Evidence::Precondition {
            name: "transitive similarities".into(),
            holds: all_transitive,
            detail: if all_transitive {
                "every similarity of the pair is transitive on the active domain".into()
            } else {
                "some similarity of the pair is not transitive; easiness is not established".into()
            },
        });
        if all_transitive {
            Label::LinearPairEasy
        } else {
            Label::Unknown
        }
    } else {
        evidence.push(Evidence::Precondition {
            name: "disjoint right-hand sides".into(),
            holds: disjoint,
            detail: if disjoint {
                "RHS(m1) ∩ RHS(m2) is empty".into()
            } else {
                format!("RHS(m1) ∩ RHS(m2) contains {}", shared_rhs.join(", "))
            },
        });
        if disjoint {
            evidence.push(Evidence::Assumption {
                detail: "every similarity has an unbounded set of mutually dissimilar values".into(),
            });
            Label::LinearPairHard
        } else {
            Label::Unknown
        }
    };
    Classification { label, evidence }
}

fn hit_cycle(g: &MdGraph, v: usize) -> bool {
    g.on_cycle(v) || g.successors(v).iter().any(|&w| g.on_cycle(w))
}

/// First conjunct or corresponding pair relating two different attributes.
fn same_attribute_violation(m: &MdSet) -> Option<String> {
    let s = m.schema();
    m.mds().iter().find_map(|md| {
        md.lhs
            .iter()
            .map(|c| (c.left, c.right))
            .chain(md.rhs.iter().map(|p| (p.left, p.right)))
            .find(|(l, r)| l != r)
            .map(|(l, r)| format!("{}: {} vs {}", md.id, s.attr_label(l), s.attr_label(r)))
    })
}

/// First MD with more than one changeable attribute on its left-hand side.
fn changeable_lhs_violation(m: &MdSet) -> Option<String> {
    let changeable = m.changeable_attrs();
    let s = m.schema();
    m.mds().iter().find_map(|md| {
        let hits: Vec<String> = md
            .lhs_attrs()
            .intersection(&changeable)
            .map(|&a| s.attr_label(a))
            .collect();
        (hits.len() > 1).then(|| format!("{}: {}", md.id, hits.join(", ")))
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::relation::Schema;
    use crate::similarity::{Similarities, SimilaritySpec};

    fn set(schema: &str, sims: Similarities, mds: &str) -> MdSet {
        MdSet::parse(
            mds,
            "m",
            Arc::new(Schema::parse(schema, "s").unwrap()),
            Arc::new(sims),
        )
        .unwrap()
    }

    fn trusting(m: &MdSet) -> Classification {
        classify(m, &Transitivity::trusting(m.sims()))
    }

    fn names(m: &MdSet, p: &AttrPartition) -> Vec<Vec<String>> {
        p.labels(m.schema())
    }

    #[test]
    fn l_components_of_filter_example() {
        let m = set(
            "relation R(A, C, E, G, I)\nrelation S(B, F, H, J)",
            Similarities::new(),
            "R[A]=S[B], R[C]=S[B], R[E]=S[F] -> R[G]==S[H]",
        );
        let (l, _) = lr_components(&m.mds()[0]);
        assert_eq!(
            names(&m, &l),
            [vec!["R[A]", "R[C]", "S[B]"], vec!["R[E]", "S[F]"]]
        );
    }

    #[test]
    fn r_component_through_shared_attribute() {
        let m = set(
            "relation R(A, C, E, G, H)\nrelation S(B, D, F, I)",
            Similarities::new(),
            "R[A]=S[B] -> R[C]==S[D], R[E]==S[D]",
        );
        let (_, r) = lr_components(&m.mds()[0]);
        assert_eq!(names(&m, &r), [vec!["R[C]", "R[E]", "S[D]"]]);
    }

    #[test]
    fn match_classes_chain_across_mds() {
        let mut sims = Similarities::new();
        for n in ["s1", "s2", "s3"] {
            sims.add(SimilaritySpec::edit_distance(n, 1, false)).unwrap();
        }
        let m = set(
            "relation R(A, C)\nrelation S(B, D, E, G, K)\nrelation T(F, H, J, L, M, N, P)",
            sims,
            "R[A]~s1 S[B] -> R[C]==S[D]; S[E]~s2 T[F], S[G]=T[H] -> S[D]==T[J], S[K]==T[L]; \
             T[F]~s3 T[H] -> T[L]==T[M], T[N]==T[P]",
        );
        assert_eq!(
            names(&m, &match_classes(&m)),
            [
                vec!["R[C]", "S[D]", "T[J]"],
                vec!["S[K]", "T[L]", "T[M]"],
                vec!["T[N]", "T[P]"]
            ]
        );
    }

    #[test]
    fn equivalent_sets_of_unbound_example() {
        let m = set(
            "relation R(A, C, E, G, H)\nrelation S(B, D, F, I)",
            Similarities::new(),
            "R[A]=S[B] -> R[C]==S[D], R[E]==S[D]; R[E]=S[F], R[G]=S[F] -> R[H]==S[I]",
        );
        let es = equivalent_sets(&m).unwrap();
        let got: Vec<(String, bool)> = es.iter().map(|e| (e.label(m.schema()), e.bound)).collect();
        assert_eq!(
            got,
            [("{R[C],R[E],R[G]}".to_string(), false), ("{S[F]}".to_string(), false)]
        );
        assert_eq!(trusting(&m).label, Label::LinearPairHard);
    }

    #[test]
    fn equivalent_sets_of_bound_example() {
        let m = set(
            "relation R(A, C, F, H, I, M)\nrelation S(B, D, E, G, N)",
            Similarities::new(),
            "R[A]=S[B] -> R[C]==S[D], R[C]==S[E], R[F]==S[G], R[H]==S[G]; \
             R[F]=S[E], R[I]=S[E], R[A]=S[E], R[F]=S[B] -> R[M]==S[N]",
        );
        let es = equivalent_sets(&m).unwrap();
        let got: Vec<(String, bool)> = es.iter().map(|e| (e.label(m.schema()), e.bound)).collect();
        assert_eq!(
            got,
            [
                ("{R[A],R[F],R[H],R[I]}".to_string(), true),
                ("{S[B],S[D],S[E]}".to_string(), true)
            ]
        );
        let c = trusting(&m);
        assert_eq!(c.label, Label::LinearPairEasy);
        assert!(c.clauses().contains(&(Side::R, "ii", true)));
        assert!(c.clauses().contains(&(Side::R, "iii", true)));
    }

    #[test]
    fn hard_pair_fails_every_clause_of_a() {
        let m = set(
            "relation R(A, B, C)\nrelation S(E, F, G)",
            Similarities::new(),
            "R[A]=S[E] -> R[B]==S[F]; R[B]=S[F] -> R[C]==S[G]",
        );
        let c = trusting(&m);
        assert_eq!(c.label, Label::LinearPairHard);
        let a: Vec<_> = c.clauses().into_iter().filter(|x| x.0 == Side::R).collect();
        assert_eq!(a, [(Side::R, "i", false), (Side::R, "ii", false), (Side::R, "iii", false)]);
        let es = equivalent_sets(&m).unwrap();
        assert!(es.iter().all(|e| !e.bound && e.attrs.len() == 1));
    }

    #[test]
    fn filtering_conjunct_makes_the_pair_easy() {
        let m = set(
            "relation R(A, B, C)\nrelation S(E, F, G)",
            Similarities::new(),
            "R[A]=S[E] -> R[B]==S[F]; R[A]=S[E], R[B]=S[F] -> R[C]==S[G]",
        );
        let c = trusting(&m);
        assert_eq!(c.label, Label::LinearPairEasy);
        assert!(c.clauses().contains(&(Side::R, "ii", false)));
        assert!(c.clauses().contains(&(Side::R, "iii", true)));
    }

    #[test]
    fn simple_cycle_and_hit_simple_cycle() {
        let sc = set(
            "relation R(A, C, F, G)",
            Similarities::new(),
            "R[A]=R[A] -> R[C]==R[C], R[F]==R[F], R[G]==R[G]; \
             R[C]=R[C] -> R[A]==R[A], R[F]==R[F], R[G]==R[G]",
        );
        assert_eq!(trusting(&sc).label, Label::SimpleCycle);

        let hsc = set(
            "relation R(A, B, C)",
            Similarities::new(),
            "R[A]=R[A] -> R[B]==R[B]; R[B]=R[B] -> R[A]==R[A]; R[C]=R[C] -> R[A]==R[A]",
        );
        assert_eq!(trusting(&hsc).label, Label::HitSimpleCycle);

        let two_changeable = set(
            "relation R(A, B)",
            Similarities::new(),
            "R[A]=R[A], R[B]=R[B] -> R[A]==R[A], R[B]==R[B]",
        );
        assert_eq!(trusting(&two_changeable).label, Label::Unknown);
    }

    #[test]
    fn non_interacting() {
        let m = set(
            "relation R(A, B)",
            Similarities::new(),
            "R[A]=R[A] -> R[B]==R[B]",
        );
        assert_eq!(trusting(&m).label, Label::NonInteracting);
    }

    #[test]
    fn non_transitive_similarity_blocks_easiness() {
        let mut sims = Similarities::new();
        sims.add(SimilaritySpec::edit_distance("near", 1, false)).unwrap();
        let m = set(
            "relation R(A, B, C)\nrelation S(E, F, G)",
            sims,
            "R[A]~near S[E] -> R[B]==S[F]; R[A]~near S[E], R[B]=S[F] -> R[C]==S[G]",
        );
        let c = trusting(&m);
        assert_eq!(c.label, Label::Unknown);
        assert!(c.evidence.iter().any(|e| matches!(
            e,
            Evidence::Precondition { holds: false, .. }
        )));
    }

    #[test]
    fn shared_rhs_blocks_hardness() {
        let m = set(
            "relation R(A, B, C)\nrelation S(E, F, G)",
            Similarities::new(),
            "R[A]=S[E] -> R[B]==S[F], R[C]==S[G]; R[B]=S[F] -> R[C]==S[G]",
        );
        assert_eq!(trusting(&m).label, Label::Unknown);
    }

    #[test]
    fn label_ignores_md_order() {
        let m = set(
            "relation R(A, C, E, G, H)\nrelation S(B, D, F, I)",
            Similarities::new(),
            "R[A]=S[B] -> R[C]==S[D], R[E]==S[D]; R[E]=S[F], R[G]=S[F] -> R[H]==S[I]",
        );
        assert_eq!(trusting(&m).label, trusting(&m.permuted(&[1, 0])).label);
    }
}
