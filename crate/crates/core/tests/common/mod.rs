#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use mdres::bundle::Bundle;
use mdres::md::MdSet;
use mdres::query::{is_ujcq, ConjunctiveQuery};
use mdres::relation::{Instance, Position, RawRow, Schema, Tid, Value};
use mdres::similarity::{Similarities, SimilaritySpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x6d64_7265;

pub fn fixture_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> Bundle {
    Bundle::load_dir(&fixture_dir(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn fixture_names() -> Vec<String> {
    let mut out: Vec<String> = std::fs::read_dir(fixture_dir(""))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    out.sort();
    out
}

/// Seed from `MDRES_SEED`, or a fixed default.
pub fn seed() -> u64 {
    std::env::var("MDRES_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed());
    r.set_stream(stream);
    r
}

pub fn rows(d: &Instance, rel: usize) -> Vec<Vec<String>> {
    d.tuples(rel)
        .map(|(_, v)| v.iter().map(ToString::to_string).collect())
        .collect()
}

/// A generated test case.
#[derive(Debug, Clone)]
pub struct Case {
    pub instance: Instance,
    pub mds: MdSet,
}

pub fn value_pool(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

fn schema_text(arities: &[usize]) -> String {
    let names = ["R", "S"];
    let attrs = ["A", "B", "C", "D"];
    arities
        .iter()
        .enumerate()
        .map(|(r, &k)| format!("relation {}({})", names[r], attrs[..k].join(", ")))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn random_instance(rng: &mut ChaCha8Rng, schema: &Arc<Schema>, tuples: usize, pool: &[String]) -> Instance {
    let nrel = schema.relations().len();
    let mut per: Vec<Vec<RawRow>> = vec![Vec::new(); nrel];
    for i in 0..tuples {
        let r = if i < nrel { i } else { rng.gen_range(0..nrel) };
        let k = schema.relation(r).arity();
        per[r].push(RawRow::new((0..k).map(|_| pool.choose(rng).unwrap().clone())));
    }
    let named: Vec<(&str, Vec<RawRow>)> = schema
        .relations()
        .iter()
        .zip(per)
        .map(|(rs, rows)| (rs.name.as_str(), rows))
        .collect();
    Instance::load(schema.clone(), named).unwrap()
}

/// A symmetric table similarity over `pool` with random pairs, not declared transitive.
fn random_table(rng: &mut ChaCha8Rng, name: &str, pool: &[String]) -> SimilaritySpec {
    let mut pairs = Vec::new();
    for (i, a) in pool.iter().enumerate() {
        for b in &pool[i + 1..] {
            if rng.gen_bool(0.3) {
                pairs.push((a.as_str(), b.as_str()));
            }
        }
    }
    SimilaritySpec::table(name, pairs, false)
}

/// An equivalence relation over `pool` with random classes, declared transitive.
fn random_classes(rng: &mut ChaCha8Rng, name: &str, pool: &[String]) -> SimilaritySpec {
    let labels: Vec<usize> = pool.iter().map(|_| rng.gen_range(0..pool.len().max(2) - 1)).collect();
    let mut pairs = Vec::new();
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            if labels[i] == labels[j] {
                pairs.push((pool[i].as_str(), pool[j].as_str()));
            }
        }
    }
    SimilaritySpec::table(name, pairs, true)
}

fn attr(rel: &str, a: usize) -> String {
    format!("{rel}[{}]", ["A", "B", "C", "D"][a])
}

/// A random set of one or two MDs with no edge in the MD graph, over one or two
/// relations, possibly with a non-transitive similarity.
pub fn random_ni_case(rng: &mut ChaCha8Rng) -> Case {
    loop {
        let nrel = rng.gen_range(1..=2);
        let arities: Vec<usize> = (0..nrel).map(|_| rng.gen_range(2..=3)).collect();
        let schema = Arc::new(Schema::parse(&schema_text(&arities), "gen").unwrap());
        let pool = value_pool(rng.gen_range(2..=4));
        let mut sims = Similarities::new();
        sims.add(random_table(rng, "s", &pool)).unwrap();
        let names = ["R", "S"];
        let mut mds = Vec::new();
        for i in 0..rng.gen_range(1..=2) {
            let l = rng.gen_range(0..nrel);
            let r = rng.gen_range(0..nrel);
            let (la, ra) = (arities[l], arities[r]);
            let lhs_l = rng.gen_range(0..la);
            let lhs_r = rng.gen_range(0..ra);
            let op = if rng.gen_bool(0.5) { "=" } else { "~s " };
            let mut rhs = Vec::new();
            for _ in 0..rng.gen_range(1..=2) {
                let (x, y) = (rng.gen_range(0..la), rng.gen_range(0..ra));
                rhs.push(format!("{}=={}", attr(names[l], x), attr(names[r], y)));
            }
            mds.push(format!(
                "m{i}: {}{op}{} -> {}",
                attr(names[l], lhs_l),
                attr(names[r], lhs_r),
                rhs.join(", ")
            ));
        }
        let Ok(m) = MdSet::parse(&mds.join(";\n"), "gen", schema.clone(), Arc::new(sims)) else {
            continue;
        };
        if !m.graph().is_edgeless() {
            continue;
        }
        let tuples = rng.gen_range(2..=8);
        let instance = random_instance(rng, &schema, tuples, &pool);
        return Case { instance, mds: m };
    }
}

/// Up to three random MDs over one or two relations, with no restriction on
/// how they interact.
pub fn random_interacting_case(rng: &mut ChaCha8Rng) -> Case {
    loop {
        let nrel = rng.gen_range(1..=2);
        let arities: Vec<usize> = (0..nrel).map(|_| rng.gen_range(2..=3)).collect();
        let schema = Arc::new(Schema::parse(&schema_text(&arities), "gen").unwrap());
        let pool = value_pool(rng.gen_range(2..=3));
        let mut sims = Similarities::new();
        sims.add(random_table(rng, "s", &pool)).unwrap();
        let names = ["R", "S"];
        let mut mds = Vec::new();
        for i in 0..rng.gen_range(1..=3) {
            let l = rng.gen_range(0..nrel);
            let r = rng.gen_range(0..nrel);
            let (la, ra) = (arities[l], arities[r]);
            let op = if rng.gen_bool(0.5) { "=" } else { "~s " };
            let (x, y) = (rng.gen_range(0..la), rng.gen_range(0..ra));
            let lhs = format!("{}{op}{}", attr(names[l], x), attr(names[r], y));
            let (x, y) = (rng.gen_range(0..la), rng.gen_range(0..ra));
            mds.push(format!("m{i}: {lhs} -> {}=={}", attr(names[l], x), attr(names[r], y)));
        }
        let Ok(m) = MdSet::parse(&mds.join(";\n"), "gen", schema.clone(), Arc::new(sims)) else {
            continue;
        };
        let tuples = rng.gen_range(2..=5);
        let instance = random_instance(rng, &schema, tuples, &pool);
        return Case { instance, mds: m };
    }
}

/// A random two-MD simple-cycle set over `R`, optionally hit by MDs whose left-hand
/// sides are unchangeable, with transitive similarities.
pub fn random_hsc_case(rng: &mut ChaCha8Rng) -> Case {
    loop {
        let arity = rng.gen_range(2..=4);
        let schema = Arc::new(Schema::parse(&schema_text(&[arity]), "gen").unwrap());
        let pool = value_pool(rng.gen_range(2..=4));
        let mut sims = Similarities::new();
        sims.add(random_classes(rng, "t", &pool)).unwrap();
        let sim = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { "=" } else { "~t " };
        let cycle_len = 2;
        let mut order: Vec<usize> = (0..arity).collect();
        order.shuffle(rng);
        let cyc = &order[..cycle_len];
        let extra = &order[cycle_len..];
        let mut mds = Vec::new();
        for i in 0..cycle_len {
            let (a, b) = (cyc[i], cyc[(i + 1) % cycle_len]);
            let mut rhs = vec![format!("{0}=={0}", attr("R", b))];
            for &x in extra {
                if rng.gen_bool(0.25) {
                    rhs.push(format!("{0}=={0}", attr("R", x)));
                }
            }
            mds.push(format!("c{i}: {0}{1}{0} -> {2}", attr("R", a), sim(rng), rhs.join(", ")));
        }
        for (j, &x) in extra.iter().enumerate() {
            if rng.gen_bool(0.5) {
                let target = cyc[rng.gen_range(0..cycle_len)];
                mds.push(format!(
                    "h{j}: {0}{1}{0} -> {2}=={2}",
                    attr("R", x),
                    sim(rng),
                    attr("R", target)
                ));
            }
        }
        let Ok(m) = MdSet::parse(&mds.join(";\n"), "gen", schema.clone(), Arc::new(sims)) else {
            continue;
        };
        let tuples = rng.gen_range(2..=6);
        let instance = random_instance(rng, &schema, tuples, &pool);
        if !m.classify_on(&instance).label.is_fast_eligible() {
            continue;
        }
        return Case { instance, mds: m };
    }
}

/// A random conjunctive query with up to `max_atoms` atoms over the schema of `m`,
/// with constants only at unchangeable positions. Not necessarily UJCQ.
pub fn random_query(rng: &mut ChaCha8Rng, m: &MdSet, pool: &[String], max_atoms: usize) -> ConjunctiveQuery {
    let schema = m.schema();
    let changeable = m.changeable_attrs();
    let vars = ["x", "y", "z", "w", "u"];
    loop {
        let mut atoms = Vec::new();
        let mut used: Vec<&str> = Vec::new();
        for _ in 0..rng.gen_range(1..=max_atoms) {
            let rel = rng.gen_range(0..schema.relations().len());
            let rs = schema.relation(rel);
            let terms: Vec<String> = (0..rs.arity())
                .map(|a| {
                    let ch = changeable.contains(&mdres::relation::AttrRef::new(rel, a));
                    if !ch && rng.gen_bool(0.15) {
                        format!("'{}'", pool.choose(rng).unwrap())
                    } else {
                        let v = *vars.choose(rng).unwrap();
                        used.push(v);
                        v.to_string()
                    }
                })
                .collect();
            atoms.push(format!("{}({})", rs.name, terms.join(",")));
        }
        used.sort();
        used.dedup();
        let head: Vec<&str> = used.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
        let text = format!("Q({}) :- {}", head.join(","), atoms.join(", "));
        if let Ok(q) = ConjunctiveQuery::parse(&text, schema) {
            return q;
        }
    }
}

/// A random UJCQ query.
pub fn random_ujcq(rng: &mut ChaCha8Rng, m: &MdSet, pool: &[String], max_atoms: usize) -> ConjunctiveQuery {
    loop {
        let q = random_query(rng, m, pool, max_atoms);
        if is_ujcq(&q, m).ok {
            return q;
        }
    }
}

/// The same instance with tuple ids renamed by `map`.
pub fn relabel(d: &Instance, map: &BTreeMap<Tid, Tid>) -> Instance {
    let mut out = Instance::empty(d.schema().clone());
    for rel in 0..d.schema().relations().len() {
        for (tid, vals) in d.tuples(rel) {
            out.insert(rel, map[&tid], vals.to_vec());
        }
    }
    out
}

pub fn random_permutation(rng: &mut ChaCha8Rng, d: &Instance) -> BTreeMap<Tid, Tid> {
    let tids: Vec<Tid> = d.positions().map(|p| p.tid).collect::<BTreeSet<_>>().into_iter().collect();
    let mut shuffled = tids.clone();
    shuffled.shuffle(rng);
    tids.into_iter()
        .zip(shuffled.into_iter().map(|t| Tid(t.0 + 100)))
        .collect()
}

/// Every pair of positions that an MD links in `d`, found by checking all
/// ordered tuple pairs directly.
pub fn links_brute_force(d: &Instance, m: &MdSet) -> Vec<(Position, Position)> {
    let mut out = Vec::new();
    for md in m.mds() {
        for (t1, v1) in d.tuples(md.left) {
            for (t2, v2) in d.tuples(md.right) {
                let holds = md
                    .lhs
                    .iter()
                    .all(|c| m.sims().similar(c.sim, &v1[c.left.attr], &v2[c.right.attr]));
                if holds {
                    for p in &md.rhs {
                        out.push((
                            Position::new(md.left, t1, p.left.attr),
                            Position::new(md.right, t2, p.right.attr),
                        ));
                    }
                }
            }
        }
    }
    out
}

pub fn values(xs: &[&str]) -> Vec<Value> {
    xs.iter().map(|s| Value::new(s)).collect()
}
