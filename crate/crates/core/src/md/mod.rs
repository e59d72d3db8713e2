//! Matching dependencies: model, parser, MD-graph and tractability classifier.

mod classify;
mod graph;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

pub use classify::{
    classify, equivalent_sets, lr_components, match_classes, AttrPartition, Classification,
    EquivalentSet, Evidence, Label, PartitionRole, Side,
};
pub use graph::MdGraph;

use crate::error::{Error, Result};
use crate::relation::{AttrRef, Instance, RelId, Schema, Tid, Value};
use crate::similarity::{SimId, Similarities, Transitivity};

/// A similarity conjunct `R[A] ~ S[B]` of an MD's left-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Conjunct {
    pub left: AttrRef,
    pub right: AttrRef,
    pub sim: SimId,
}

/// A corresponding pair `R[C] == S[E]` of an MD's right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatchPair {
    pub left: AttrRef,
    pub right: AttrRef,
}

/// One matching dependency between relations `left` and `right` (possibly equal).
///
/// All left attributes of the conjuncts and pairs belong to `left`, all right
/// attributes to `right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Md {
    pub id: String,
    pub left: RelId,
    pub right: RelId,
    pub lhs: Vec<Conjunct>,
    pub rhs: Vec<MatchPair>,
}

impl Md {
    pub fn lhs_attrs(&self) -> BTreeSet<AttrRef> {
        self.lhs.iter().flat_map(|c| [c.left, c.right]).collect()
    }

    pub fn rhs_attrs(&self) -> BTreeSet<AttrRef> {
        self.rhs.iter().flat_map(|p| [p.left, p.right]).collect()
    }

    /// The same MD with its two relations swapped.
    pub fn reversed(&self) -> Md {
        Md {
            id: self.id.clone(),
            left: self.right,
            right: self.left,
            lhs: self
                .lhs
                .iter()
                .map(|c| Conjunct {
                    left: c.right,
                    right: c.left,
                    sim: c.sim,
                })
                .collect(),
            rhs: self
                .rhs
                .iter()
                .map(|p| MatchPair {
                    left: p.right,
                    right: p.left,
                })
                .collect(),
        }
    }

    /// This MD oriented so that it reads `left ~ right`, if it relates those relations.
    pub fn oriented(&self, left: RelId, right: RelId) -> Option<Md> {
        if (self.left, self.right) == (left, right) {
            Some(self.clone())
        } else if (self.right, self.left) == (left, right) {
            Some(self.reversed())
        } else {
            None
        }
    }

    /// Whether `t1 ∈ left` and `t2 ∈ right` satisfy the similarity condition.
    pub fn lhs_holds(&self, sims: &Similarities, t1: &[Value], t2: &[Value]) -> bool {
        self.lhs
            .iter()
            .all(|c| sims.similar(c.sim, &t1[c.left.attr], &t2[c.right.attr]))
    }

    /// All ordered pairs `(t1, t2)`, `t1` from `left` and `t2` from `right`, that
    /// satisfy the similarity condition in `d`. Includes `(t, t)` when `left == right`.
    pub fn similar_pairs(&self, sims: &Similarities, d: &Instance) -> Vec<(Tid, Tid)> {
        let lefts: Vec<(Tid, &[Value])> = d.tuples(self.left).collect();
        let rights: Vec<(Tid, &[Value])> = d.tuples(self.right).collect();
        let scan = |(t1, v1): &(Tid, &[Value])| -> Vec<(Tid, Tid)> {
            rights
                .iter()
                .filter(|(_, v2)| self.lhs_holds(sims, v1, v2))
                .map(|(t2, _)| (*t1, *t2))
                .collect()
        };
        if lefts.len() * rights.len() >= 4096 {
            lefts.par_iter().flat_map_iter(scan).collect()
        } else {
            lefts.iter().flat_map(scan).collect()
        }
    }

    pub fn display<'a>(&'a self, set: &'a MdSet) -> impl fmt::Display + 'a {
        MdDisplay { md: self, set }
    }
}

struct MdDisplay<'a> {
    md: &'a Md,
    set: &'a MdSet,
}

impl fmt::Display for MdDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.set.schema;
        let lhs: Vec<String> = self
            .md
            .lhs
            .iter()
            .map(|c| {
                let op = match self.set.sims.get(c.sim).name.as_str() {
                    crate::similarity::EQUALITY => "=".to_string(),
                    name => format!("~{name}"),
                };
                format!("{}{op}{}", s.attr_label(c.left), s.attr_label(c.right))
            })
            .collect();
        let rhs: Vec<String> = self
            .md
            .rhs
            .iter()
            .map(|p| format!("{}=={}", s.attr_label(p.left), s.attr_label(p.right)))
            .collect();
        write!(f, "{}: {} -> {}", self.md.id, lhs.join(", "), rhs.join(", "))
    }
}

/// A set of MDs in standard form, together with the schema and similarities it refers to.
#[derive(Debug, Clone)]
pub struct MdSet {
    schema: Arc<Schema>,
    sims: Arc<Similarities>,
    mds: Vec<Md>,
}

impl MdSet {
    /// Validates the MDs and brings them into standard form: MDs whose left-hand
    /// sides consist of the same conjuncts are merged, keeping the first id.
    pub fn new(schema: Arc<Schema>, sims: Arc<Similarities>, mds: Vec<Md>) -> Result<Self> {
        let mut out: Vec<Md> = Vec::new();
        let mut ids = BTreeSet::new();
        for md in mds {
            validate(&schema, &sims, &md)?;
            if !ids.insert(md.id.clone()) {
                return Err(Error::InvalidMd(format!("duplicate MD id {}", md.id)));
            }
            let key = lhs_key(&md);
            match out.iter_mut().find(|o| lhs_key(o) == key) {
                Some(prev) => {
                    let md = md.oriented(prev.left, prev.right).expect("same relations");
                    for p in md.rhs {
                        if !prev.rhs.contains(&p) {
                            prev.rhs.push(p);
                        }
                    }
                }
                None => out.push(md),
            }
        }
        Ok(MdSet {
            schema,
            sims,
            mds: out,
        })
    }

    pub fn parse(text: &str, file: &str, schema: Arc<Schema>, sims: Arc<Similarities>) -> Result<Self> {
        let mds = parse::parse_mds(text, file, &schema, &sims)?;
        MdSet::new(schema, sims, mds)
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn sims(&self) -> &Arc<Similarities> {
        &self.sims
    }

    pub fn mds(&self) -> &[Md] {
        &self.mds
    }

    pub fn len(&self) -> usize {
        self.mds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mds.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.mds
            .iter()
            .position(|m| m.id == id)
            .ok_or_else(|| Error::UnknownMd(id.to_string()))
    }

    /// Attributes that occur on the right-hand side of some MD.
    pub fn changeable_attrs(&self) -> BTreeSet<AttrRef> {
        self.mds.iter().flat_map(Md::rhs_attrs).collect()
    }

    pub fn graph(&self) -> MdGraph {
        MdGraph::build(self)
    }

    /// Same MDs in a different order (used to check order independence).
    pub fn permuted(&self, order: &[usize]) -> MdSet {
        MdSet {
            schema: self.schema.clone(),
            sims: self.sims.clone(),
            mds: order.iter().map(|&i| self.mds[i].clone()).collect(),
        }
    }

    /// Per similarity, the values of all columns it is applied to in `d`.
    pub fn similarity_domains(&self, d: &Instance) -> BTreeMap<SimId, BTreeSet<Value>> {
        let mut out: BTreeMap<SimId, BTreeSet<Value>> = BTreeMap::new();
        for md in &self.mds {
            for c in &md.lhs {
                let dom = out.entry(c.sim).or_default();
                for a in [c.left, c.right] {
                    dom.extend(d.column(a).map(|p| d.value(p).clone()));
                }
            }
        }
        out
    }

    /// Transitivity of every similarity, checked on the values it is applied to in `d`.
    pub fn checked_transitivity(&self, d: &Instance) -> Transitivity {
        self.sims.check_transitivity(&self.similarity_domains(d))
    }

    /// Classification with transitivity checked against `d`.
    pub fn classify_on(&self, d: &Instance) -> Classification {
        classify(self, &self.checked_transitivity(d))
    }

    /// Renders the set in the MD language.
    pub fn to_text(&self) -> String {
        self.mds
            .iter()
            .map(|m| m.display(self).to_string())
            .collect::<Vec<_>>()
            .join(";\n")
    }
}

fn validate(schema: &Schema, sims: &Similarities, md: &Md) -> Result<()> {
    if md.lhs.is_empty() || md.rhs.is_empty() {
        return Err(Error::InvalidMd(format!(
            "{}: both sides must be non-empty",
            md.id
        )));
    }
    let pairs = md
        .lhs
        .iter()
        .map(|c| (c.left, c.right))
        .chain(md.rhs.iter().map(|p| (p.left, p.right)));
    for (l, r) in pairs {
        if l.rel != md.left || r.rel != md.right {
            return Err(Error::InvalidMd(format!(
                "{}: {} and {} do not relate {} to {}",
                md.id,
                schema.attr_label(l),
                schema.attr_label(r),
                schema.rel_name(md.left),
                schema.rel_name(md.right)
            )));
        }
        if schema.domain(l) != schema.domain(r) {
            return Err(Error::InvalidMd(format!(
                "{}: {} ({}) and {} ({}) have different domains",
                md.id,
                schema.attr_label(l),
                schema.domain(l),
                schema.attr_label(r),
                schema.domain(r)
            )));
        }
    }
    for c in &md.lhs {
        if c.sim >= sims.len() {
            return Err(Error::UnknownSimilarity(format!("#{}", c.sim)));
        }
    }
    Ok(())
}

/// Orientation-independent identity of a left-hand side.
fn lhs_key(md: &Md) -> (RelId, RelId, BTreeSet<Conjunct>) {
    let md = if md.left <= md.right {
        md.clone()
    } else {
        md.reversed()
    };
    (md.left, md.right, md.lhs.iter().copied().collect())
}
