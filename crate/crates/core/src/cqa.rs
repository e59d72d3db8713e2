//! Reduction from resolved answers under a key-style MD
//! `R[K] = R[K] -> R[B] == R[B]` to consistent answers under the key `K -> B`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::md::MdSet;
use crate::query::{eval_cq, AnswerSet, ConjunctiveQuery, Provenance};
use crate::relation::{Instance, RelId, Schema, Tid, Value};
use crate::similarity::Similarities;

/// A relation with a key, together with the transformed extension `R'`: per
/// key value, the key times the most frequent values of each non-key attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyedRelation {
    pub schema: Arc<Schema>,
    pub rel: RelId,
    pub key: Vec<usize>,
    pub nonkey: Vec<usize>,
    /// `R'` as value rows in schema attribute order.
    pub rows: BTreeSet<Vec<Value>>,
}

impl KeyedRelation {
    fn key_of(&self, row: &[Value]) -> Vec<Value> {
        self.key.iter().map(|&a| row[a].clone()).collect()
    }

    /// `R'` grouped by key value.
    pub fn groups(&self) -> BTreeMap<Vec<Value>, Vec<&Vec<Value>>> {
        let mut out: BTreeMap<Vec<Value>, Vec<&Vec<Value>>> = BTreeMap::new();
        for r in &self.rows {
            out.entry(self.key_of(r)).or_default().push(r);
        }
        out
    }

    /// `R'` as an instance, tuple ids numbered from 1 in row order.
    pub fn to_instance(&self) -> Instance {
        rows_instance(&self.schema, self.rel, self.rows.iter())
    }

    /// The key constraint in the form `R: A, B -> C, D`.
    pub fn constraint_text(&self) -> String {
        let names = |xs: &[usize]| -> String {
            xs.iter()
                .map(|&a| self.schema.relation(self.rel).attributes[a].name.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!(
            "key {}: {} -> {}",
            self.schema.rel_name(self.rel),
            names(&self.key),
            names(&self.nonkey)
        )
    }
}

fn rows_instance<'a>(schema: &Arc<Schema>, rel: RelId, rows: impl Iterator<Item = &'a Vec<Value>>) -> Instance {
    let mut d = Instance::empty(schema.clone());
    for (i, r) in rows.enumerate() {
        d.insert(rel, Tid(i as u64 + 1), r.clone());
    }
    d
}

/// Resolves attribute names of `rel` and checks that `key` is a proper,
/// duplicate-free subset of its attributes. Returns (key, non-key) indices.
pub fn split_key(schema: &Schema, rel: RelId, key: &[&str]) -> Result<(Vec<usize>, Vec<usize>)> {
    let rs = schema.relation(rel);
    let mut idx = Vec::new();
    for name in key {
        let a = rs.attr_index(name).ok_or_else(|| {
            Error::UnknownAttribute(format!("{}.{name}", schema.rel_name(rel)))
        })?;
        if idx.contains(&a) {
            return Err(Error::KeyOverlap(format!("{name} is listed twice")));
        }
        idx.push(a);
    }
    if idx.is_empty() {
        return Err(Error::Config("the key needs at least one attribute".into()));
    }
    let nonkey: Vec<usize> = (0..rs.arity()).filter(|a| !idx.contains(a)).collect();
    if nonkey.is_empty() {
        return Err(Error::KeyOverlap("every attribute is in the key".into()));
    }
    Ok((idx, nonkey))
}

/// The MD `R[K] = R[K] -> R[B] == R[B]` implied by a key.
pub fn key_md(schema: &Arc<Schema>, rel: RelId, key: &[usize], nonkey: &[usize]) -> Result<MdSet> {
    let rs = schema.relation(rel);
    let r = &rs.name;
    let side = |xs: &[usize], op: &str| -> String {
        xs.iter()
            .map(|&a| format!("{r}[{n}]{op}{r}[{n}]", n = rs.attributes[a].name))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let text = format!("{} -> {}", side(key, "="), side(nonkey, "=="));
    MdSet::parse(&text, "<key>", schema.clone(), Arc::new(Similarities::new()))
}

/// Builds `R'`: for each key value `k`, `{k} x B_1^k x ... x B_n^k`, where `B_i^k`
/// holds the most frequent values of the i-th non-key attribute among the tuples with key `k`.
pub fn build_cqa_instance(d: &Instance, rel: RelId, key: &[usize]) -> Result<KeyedRelation> {
    let schema = d.schema().clone();
    let names: Vec<&str> = key
        .iter()
        .map(|&a| {
            schema
                .relation(rel)
                .attributes
                .get(a)
                .map(|x| x.name.as_str())
                .ok_or_else(|| Error::UnknownAttribute(format!("{}#{a}", schema.rel_name(rel))))
        })
        .collect::<Result<_>>()?;
    let (key, nonkey) = split_key(&schema, rel, &names)?;
    let mut groups: BTreeMap<Vec<Value>, Vec<&[Value]>> = BTreeMap::new();
    for (_, vals) in d.tuples(rel) {
        groups
            .entry(key.iter().map(|&a| vals[a].clone()).collect())
            .or_default()
            .push(vals);
    }
    let mut rows = BTreeSet::new();
    for (k, tuples) in groups {
        let choices: Vec<Vec<Value>> = nonkey
            .iter()
            .map(|&b| {
                let mut freq: BTreeMap<&Value, usize> = BTreeMap::new();
                for t in &tuples {
                    *freq.entry(&t[b]).or_default() += 1;
                }
                let max = freq.values().copied().max().unwrap_or(0);
                freq.into_iter()
                    .filter(|&(_, n)| n == max)
                    .map(|(v, _)| v.clone())
                    .collect()
            })
            .collect();
        let sizes: Vec<usize> = choices.iter().map(Vec::len).collect();
        for pick in crate::resolve::choice_vectors(&sizes) {
            let mut row = vec![Value::new(""); key.len() + nonkey.len()];
            for (&a, v) in key.iter().zip(&k) {
                row[a] = v.clone();
            }
            for ((&b, c), &i) in nonkey.iter().zip(&choices).zip(&pick) {
                row[b] = c[i].clone();
            }
            rows.insert(row);
        }
    }
    Ok(KeyedRelation {
        schema,
        rel,
        key,
        nonkey,
        rows,
    })
}

/// Every maximal key-consistent subset of `R'`: one row per key value.
pub fn enumerate_key_repairs(kr: &KeyedRelation) -> Vec<BTreeSet<Vec<Value>>> {
    let groups: Vec<Vec<&Vec<Value>>> = kr.groups().into_values().collect();
    let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let mut out: Vec<BTreeSet<Vec<Value>>> = crate::resolve::choice_vectors(&sizes)
        .map(|pick| {
            groups
                .iter()
                .zip(&pick)
                .map(|(g, &i)| g[i].clone())
                .collect()
        })
        .collect();
    out.sort();
    out
}

/// Answers true in every repair of `R'`.
pub fn consistent_answers(q: &ConjunctiveQuery, kr: &KeyedRelation) -> AnswerSet {
    let mut acc: Option<BTreeSet<Vec<Value>>> = None;
    for repair in enumerate_key_repairs(kr) {
        let d = rows_instance(&kr.schema, kr.rel, repair.iter());
        let ans = eval_cq(q, &d).tuples;
        acc = Some(match acc {
            None => ans,
            Some(mut a) => {
                a.retain(|t| ans.contains(t));
                a
            }
        });
    }
    AnswerSet {
        tuples: acc.unwrap_or_default(),
        provenance: Provenance::Plain,
    }
}
