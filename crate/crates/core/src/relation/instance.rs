use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Serialize, Serializer};

use super::schema::{AttrRef, RelId, Schema};
use crate::error::{Error, Result};

/// Opaque tuple identifier, unique across an instance and never updated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Tid(pub u64);

impl fmt::Display for Tid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An attribute value.
///
/// `Fresh` values are produced only by the chase oracle: each is similar to
/// itself and to nothing else under every similarity relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Const(Arc<str>),
    Fresh(u32),
}

impl Value {
    pub fn new(s: &str) -> Self {
        Value::Const(Arc::from(s))
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Const(s) => Some(s),
            Value::Fresh(_) => None,
        }
    }

    pub fn is_fresh(&self) -> bool {
        matches!(self, Value::Fresh(_))
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::new(s)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Const(s) => f.write_str(s),
            Value::Fresh(n) => write!(f, "_fresh{n}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A value position `(t, A)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub rel: RelId,
    pub tid: Tid,
    pub attr: usize,
}

impl Position {
    pub fn new(rel: RelId, tid: Tid, attr: usize) -> Self {
        Position { rel, tid, attr }
    }

    pub fn attr_ref(&self) -> AttrRef {
        AttrRef::new(self.rel, self.attr)
    }
}

/// Positions whose values differ between two correlated instances.
pub type ChangeSet = BTreeSet<Position>;

/// One input row prior to tuple-id assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRow {
    pub tid: Option<u64>,
    pub values: Vec<String>,
}

impl RawRow {
    pub fn new<S: Into<String>>(values: impl IntoIterator<Item = S>) -> Self {
        RawRow {
            tid: None,
            values: values.into_iter().map(Into::into).collect(),
        }
    }

    pub fn with_tid<S: Into<String>>(tid: u64, values: impl IntoIterator<Item = S>) -> Self {
        RawRow {
            tid: Some(tid),
            ..RawRow::new(values)
        }
    }
}

/// A relational instance with stable tuple identifiers.
#[derive(Clone)]
pub struct Instance {
    schema: Arc<Schema>,
    relations: Vec<BTreeMap<Tid, Vec<Value>>>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.relations == other.relations
    }
}

impl Eq for Instance {}

impl Hash for Instance {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.relations.hash(state);
    }
}

impl PartialOrd for Instance {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Instance {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.relations.cmp(&other.relations)
    }
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (r, rel) in self.relations.iter().enumerate() {
            for (tid, vals) in rel {
                let vals: Vec<String> = vals.iter().map(|v| v.to_string()).collect();
                m.entry(
                    &format!("{}#{}", self.schema.rel_name(r), tid),
                    &vals.join(","),
                );
            }
        }
        m.finish()
    }
}

impl Instance {
    pub fn empty(schema: Arc<Schema>) -> Self {
        let relations = vec![BTreeMap::new(); schema.relations().len()];
        Instance { schema, relations }
    }

    /// Builds an instance from per-relation rows.
    ///
    /// Supplied tuple ids are kept. Rows without one get the smallest unused id,
    /// counting from 1 in input order (relations in the order given).
    pub fn load<'a>(
        schema: Arc<Schema>,
        rows: impl IntoIterator<Item = (&'a str, Vec<RawRow>)>,
    ) -> Result<Self> {
        let mut staged: Vec<(RelId, String, Vec<RawRow>)> = Vec::new();
        for (name, rs) in rows {
            let rel = schema
                .rel_id(name)
                .ok_or_else(|| Error::UnknownRelation(name.to_string()))?;
            staged.push((rel, name.to_string(), rs));
        }

        let mut used = HashSet::new();
        for (_, name, rs) in &staged {
            for (i, row) in rs.iter().enumerate() {
                if let Some(t) = row.tid {
                    if !used.insert(t) {
                        return Err(Error::DuplicateTid {
                            relation: name.clone(),
                            row: i + 1,
                            tid: t,
                        });
                    }
                }
            }
        }

        let mut inst = Instance::empty(schema.clone());
        let mut next = 1u64;
        for (rel, name, rs) in staged {
            let rschema = schema.relation(rel);
            for (i, row) in rs.into_iter().enumerate() {
                let rowno = i + 1;
                if row.values.len() != rschema.arity() {
                    return Err(Error::Arity {
                        relation: name.clone(),
                        row: rowno,
                        expected: rschema.arity(),
                        found: row.values.len(),
                    });
                }
                let mut values = Vec::with_capacity(row.values.len());
                for (raw, attr) in row.values.iter().zip(&rschema.attributes) {
                    let v = attr.domain.canonicalize(raw).map_err(|msg| Error::Domain {
                        relation: name.clone(),
                        row: rowno,
                        msg: format!("attribute {}: {msg}", attr.name),
                    })?;
                    values.push(Value::new(&v));
                }
                let tid = match row.tid {
                    Some(t) => t,
                    None => {
                        while used.contains(&next) {
                            next += 1;
                        }
                        used.insert(next);
                        next
                    }
                };
                inst.relations[rel].insert(Tid(tid), values);
            }
        }
        Ok(inst)
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn tuples(&self, rel: RelId) -> impl Iterator<Item = (Tid, &[Value])> + '_ {
        self.relations[rel].iter().map(|(t, v)| (*t, v.as_slice()))
    }

    pub fn tuple(&self, rel: RelId, tid: Tid) -> Option<&[Value]> {
        self.relations[rel].get(&tid).map(Vec::as_slice)
    }

    pub fn relation_len(&self, rel: RelId) -> usize {
        self.relations[rel].len()
    }

    /// Total number of tuples.
    pub fn len(&self) -> usize {
        self.relations.iter().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, p: Position) -> &Value {
        &self.relations[p.rel][&p.tid][p.attr]
    }

    pub fn get(&self, p: Position) -> Option<&Value> {
        self.relations.get(p.rel)?.get(&p.tid)?.get(p.attr)
    }

    pub fn set(&mut self, p: Position, v: Value) {
        if let Some(t) = self.relations[p.rel].get_mut(&p.tid) {
            t[p.attr] = v;
        }
    }

    /// Inserts (or replaces) a tuple; the value vector must have the relation's arity.
    pub fn insert(&mut self, rel: RelId, tid: Tid, values: Vec<Value>) {
        assert_eq!(values.len(), self.schema.relation(rel).arity());
        self.relations[rel].insert(tid, values);
    }

    /// All positions `T_D`, in canonical order.
    pub fn positions(&self) -> impl Iterator<Item = Position> + '_ {
        self.relations.iter().enumerate().flat_map(|(r, rel)| {
            rel.iter()
                .flat_map(move |(tid, vals)| (0..vals.len()).map(move |a| Position::new(r, *tid, a)))
        })
    }

    /// Positions of one attribute column.
    pub fn column(&self, a: AttrRef) -> impl Iterator<Item = Position> + '_ {
        self.relations[a.rel]
            .keys()
            .map(move |tid| Position::new(a.rel, *tid, a.attr))
    }

    fn tid_sets(&self) -> Vec<BTreeSet<Tid>> {
        self.relations
            .iter()
            .map(|r| r.keys().copied().collect())
            .collect()
    }

    /// The change set between two correlated instances.
    pub fn diff(&self, other: &Instance) -> Result<ChangeSet> {
        if self.relations.len() != other.relations.len() {
            return Err(Error::NotCorrelated("different schemas".into()));
        }
        let (a, b) = (self.tid_sets(), other.tid_sets());
        for (r, (x, y)) in a.iter().zip(&b).enumerate() {
            if x != y {
                return Err(Error::NotCorrelated(format!(
                    "tuple ids of {} differ",
                    self.schema.rel_name(r)
                )));
            }
        }
        Ok(self
            .positions()
            .filter(|&p| self.value(p) != other.value(p))
            .collect())
    }

    /// Number of changed positions, assuming `other` is correlated with `self`.
    pub fn change_count(&self, other: &Instance) -> usize {
        self.positions()
            .filter(|&p| other.get(p) != Some(self.value(p)))
            .count()
    }

    /// Relabels fresh values in order of first occurrence so that instances
    /// which differ only in the naming of fresh values compare equal.
    pub fn canonicalize_fresh(&mut self) {
        let mut map: BTreeMap<u32, u32> = BTreeMap::new();
        for rel in &mut self.relations {
            for vals in rel.values_mut() {
                for v in vals.iter_mut() {
                    if let Value::Fresh(n) = v {
                        let next = map.len() as u32 + 1;
                        *n = *map.entry(*n).or_insert(next);
                    }
                }
            }
        }
    }

    pub fn has_fresh(&self) -> bool {
        self.relations
            .iter()
            .flat_map(|r| r.values())
            .flatten()
            .any(Value::is_fresh)
    }

    pub fn max_fresh(&self) -> u32 {
        self.relations
            .iter()
            .flat_map(|r| r.values())
            .flatten()
            .filter_map(|v| match v {
                Value::Fresh(n) => Some(*n),
                Value::Const(_) => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// The set of value vectors per relation, with tuple ids dropped and duplicates collapsed.
    pub fn value_sets(&self) -> Vec<BTreeSet<Vec<Value>>> {
        self.relations
            .iter()
            .map(|r| r.values().cloned().collect())
            .collect()
    }

    /// Active domain of the instance.
    pub fn active_domain(&self) -> BTreeSet<Value> {
        self.relations
            .iter()
            .flat_map(|r| r.values())
            .flatten()
            .cloned()
            .collect()
    }

    /// Human-readable label of a position, `(t2,R[B])`.
    pub fn position_label(&self, p: Position) -> String {
        format!("({},{})", p.tid, self.schema.attr_label(p.attr_ref()))
    }
}
