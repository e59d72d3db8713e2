//! Tuple-attribute closure: the positions that must share a value in every MRI
//! of a non-interacting or hit-simple-cyclic MD set.

pub mod datalog;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::md::MdSet;
use crate::relation::{Instance, Position, Tid, Value};
use crate::unionfind::UnionFind;

pub use datalog::{emit_datalog, ta_blocks_from_program};

/// Partition of the positions of changeable attributes, with value frequencies
/// of each block taken over the original instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaPartition {
    blocks: Vec<Vec<Position>>,
    index: HashMap<Position, usize>,
    freq: Vec<BTreeMap<Value, usize>>,
}

impl TaPartition {
    fn from_blocks(d: &Instance, blocks: Vec<Vec<Position>>) -> Self {
        let mut index = HashMap::new();
        let mut freq = Vec::with_capacity(blocks.len());
        for (b, block) in blocks.iter().enumerate() {
            let mut f: BTreeMap<Value, usize> = BTreeMap::new();
            for &p in block {
                index.insert(p, b);
                *f.entry(d.value(p).clone()).or_default() += 1;
            }
            freq.push(f);
        }
        TaPartition {
            blocks,
            index,
            freq,
        }
    }

    /// Blocks in canonical order (each sorted, ordered by smallest member).
    pub fn blocks(&self) -> &[Vec<Position>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, p: Position) -> Option<usize> {
        self.index.get(&p).copied()
    }

    pub fn frequencies(&self, b: usize) -> &BTreeMap<Value, usize> {
        &self.freq[b]
    }

    pub fn max_frequency(&self, b: usize) -> usize {
        self.freq[b].values().copied().max().unwrap_or(0)
    }

    /// The most frequent values of block `b`, in ascending order.
    pub fn most_frequent(&self, b: usize) -> Vec<Value> {
        let max = self.max_frequency(b);
        self.freq[b]
            .iter()
            .filter(|(_, &n)| n == max)
            .map(|(v, _)| v.clone())
            .collect()
    }

    /// The value occurring strictly more often than every other value in block `b`.
    pub fn strict_winner(&self, b: usize) -> Option<&Value> {
        let max = self.max_frequency(b);
        let mut top = self.freq[b].iter().filter(|(_, &n)| n == max);
        match (top.next(), top.next()) {
            (Some((v, _)), None) => Some(v),
            _ => None,
        }
    }

    /// Blocks with at least two positions.
    pub fn nontrivial(&self) -> impl Iterator<Item = &Vec<Position>> {
        self.blocks.iter().filter(|b| b.len() > 1)
    }

    /// Human-readable rendering, one label list per block.
    pub fn labels(&self, d: &Instance) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&p| d.position_label(p)).collect())
            .collect()
    }

    /// The same partition with tuple ids renamed through `map`, re-canonicalized.
    pub fn relabeled(&self, map: &BTreeMap<Tid, Tid>) -> BTreeSet<BTreeSet<Position>> {
        self.blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|p| Position::new(p.rel, map[&p.tid], p.attr))
                    .collect()
            })
            .collect()
    }
}

/// Generating pairs of the `≈′` relation: `(t1, C) ≈′ (t2, E)` whenever `(C, E)`
/// is a corresponding pair of some `m_i` and `t1`, `t2` satisfy the similarity
/// condition of some `m_j ∈ PS(m_i)` in `d`.
pub fn approx_links(d: &Instance, m: &MdSet) -> Vec<(Position, Position)> {
    let g = m.graph();
    let sims = m.sims();
    let mut cache: HashMap<(usize, bool), Vec<(Tid, Tid)>> = HashMap::new();
    let mut out = Vec::new();
    for (i, mi) in m.mds().iter().enumerate() {
        for j in g.previous_set_of(i) {
            let mj = &m.mds()[j];
            let Some(oriented) = mj.oriented(mi.left, mi.right) else {
                continue;
            };
            let flipped = (mj.left, mj.right) != (mi.left, mi.right);
            let pairs = cache
                .entry((j, flipped))
                .or_insert_with(|| oriented.similar_pairs(sims, d));
            for &(t1, t2) in pairs.iter() {
                for p in &mi.rhs {
                    out.push((
                        Position::new(mi.left, t1, p.left.attr),
                        Position::new(mi.right, t2, p.right.attr),
                    ));
                }
            }
        }
    }
    out
}

/// The tuple-attribute closure of `m` with respect to `d`.
///
/// Every position of a changeable attribute belongs to exactly one block;
/// positions never linked form singleton blocks.
pub fn ta_closure(d: &Instance, m: &MdSet) -> TaPartition {
    let mut uf = UnionFind::new();
    for a in m.changeable_attrs() {
        for p in d.column(a) {
            uf.add(p);
        }
    }
    for (p, q) in approx_links(d, m) {
        uf.union(p, q);
    }
    TaPartition::from_blocks(d, uf.classes())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::relation::{RawRow, Schema};
    use crate::similarity::{Similarities, SimilaritySpec};

    fn instance(schema: &Arc<Schema>, rel: &str, rows: &[&[&str]]) -> Instance {
        Instance::load(
            schema.clone(),
            [(rel, rows.iter().map(|r| RawRow::new(r.iter().copied())).collect())],
        )
        .unwrap()
    }

    fn blocks_as_tids(part: &TaPartition) -> Vec<Vec<(u64, usize)>> {
        part.blocks()
            .iter()
            .map(|b| b.iter().map(|p| (p.tid.0, p.attr)).collect())
            .collect()
    }

    #[test]
    fn non_interacting_blocks() {
        let s = Arc::new(Schema::parse("relation R(A, B)", "s").unwrap());
        let m = MdSet::parse("R[A]=R[A] -> R[B]==R[B]", "m", s.clone(), Arc::new(Similarities::new()))
            .unwrap();
        let d = instance(&s, "R", &[&["a1", "c1"], &["a1", "c2"], &["b1", "c3"], &["b1", "c4"]]);
        let part = ta_closure(&d, &m);
        assert_eq!(
            blocks_as_tids(&part),
            [vec![(1, 1), (2, 1)], vec![(3, 1), (4, 1)]]
        );
        assert_eq!(part.most_frequent(0).len(), 2);
        assert_eq!(part.strict_winner(0), None);
    }

    #[test]
    fn simple_cycle_blocks() {
        let s = Arc::new(Schema::parse("relation R(A, B)", "s").unwrap());
        let mut sims = Similarities::new();
        sims.add(SimilaritySpec::table(
            "t",
            [("a1", "a2"), ("b1", "b2"), ("d1", "d2"), ("e1", "e2")],
            true,
        ))
        .unwrap();
        let m = MdSet::parse(
            "R[A]~t R[A] -> R[B]==R[B]; R[B]~t R[B] -> R[A]==R[A]",
            "m",
            s.clone(),
            Arc::new(sims),
        )
        .unwrap();
        let d = instance(
            &s,
            "R",
            &[&["a1", "d1"], &["a2", "e2"], &["b1", "e1"], &["b2", "d2"]],
        );
        let part = ta_closure(&d, &m);
        assert_eq!(
            blocks_as_tids(&part),
            [
                vec![(1, 0), (2, 0), (3, 0), (4, 0)],
                vec![(1, 1), (2, 1), (3, 1), (4, 1)]
            ]
        );
        assert_eq!(part.most_frequent(0).len(), 4);
    }

    #[test]
    fn nothing_similar_means_singletons() {
        let s = Arc::new(Schema::parse("relation R(A, B)", "s").unwrap());
        let m = MdSet::parse("R[A]=R[A] -> R[B]==R[B]", "m", s.clone(), Arc::new(Similarities::new()))
            .unwrap();
        let d = instance(&s, "R", &[&["a", "1"], &["b", "1"], &["c", "2"]]);
        let part = ta_closure(&d, &m);
        assert_eq!(part.len(), 3);
        assert_eq!(part.nontrivial().count(), 0);
    }

    #[test]
    fn self_pair_links_different_attributes() {
        let s = Arc::new(Schema::parse("relation R(A, B, C)", "s").unwrap());
        let m = MdSet::parse("R[A]=R[A] -> R[B]==R[C]", "m", s.clone(), Arc::new(Similarities::new()))
            .unwrap();
        let d = instance(&s, "R", &[&["a", "1", "2"]]);
        let part = ta_closure(&d, &m);
        assert_eq!(blocks_as_tids(&part), [vec![(1, 1), (1, 2)]]);
    }

    #[test]
    fn datalog_program_agrees_with_union_find() {
        let s = Arc::new(Schema::parse("relation R(A, B)", "s").unwrap());
        let m = MdSet::parse(
            "R[A]=R[A] -> R[B]==R[B]; R[B]=R[B] -> R[A]==R[A]",
            "m",
            s.clone(),
            Arc::new(Similarities::new()),
        )
        .unwrap();
        let d = instance(&s, "R", &[&["a", "x"], &["a", "y"], &["b", "y"], &["c", "z"]]);
        let text = emit_datalog(&d, &m);
        assert!(text.contains("sim_m1(1, 2)."));
        let from_program: Vec<_> = ta_blocks_from_program(&text, &d)
            .unwrap()
            .into_iter()
            .filter(|b| b.len() > 1)
            .collect();
        let direct: Vec<_> = ta_closure(&d, &m).nontrivial().cloned().collect();
        assert_eq!(from_program, direct);
        assert_eq!(direct.len(), 2);
    }
}
