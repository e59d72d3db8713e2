use std::collections::{BTreeSet, VecDeque};

use super::MdSet;
use crate::error::Result;

/// Directed graph over MD indices with an edge `m1 -> m2` whenever
/// `RHS(m1) ∩ LHS(m2)` is non-empty. Self-loops are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdGraph {
    ids: Vec<String>,
    succ: Vec<BTreeSet<usize>>,
}

impl MdGraph {
    pub fn build(m: &MdSet) -> Self {
        let mds = m.mds();
        let lhs: Vec<_> = mds.iter().map(|x| x.lhs_attrs()).collect();
        let succ = mds
            .iter()
            .map(|m1| {
                let rhs = m1.rhs_attrs();
                (0..mds.len())
                    .filter(|&j| !rhs.is_disjoint(&lhs[j]))
                    .collect()
            })
            .collect();
        MdGraph {
            ids: mds.iter().map(|x| x.id.clone()).collect(),
            succ,
        }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn successors(&self, v: usize) -> &BTreeSet<usize> {
        &self.succ[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.succ[a].contains(&b)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, s)| s.iter().map(move |&b| (a, b)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(BTreeSet::len).sum()
    }

    pub fn is_edgeless(&self) -> bool {
        self.edge_count() == 0
    }

    /// Vertices reachable from `v` through at least one edge.
    pub fn reachable(&self, v: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<usize> = self.succ[v].iter().copied().collect();
        while let Some(x) = queue.pop_front() {
            if seen.insert(x) {
                queue.extend(self.succ[x].iter().copied());
            }
        }
        seen
    }

    /// Whether `v` lies on a cycle of non-zero length (a self-loop counts).
    pub fn on_cycle(&self, v: usize) -> bool {
        self.reachable(v).contains(&v)
    }

    /// Whether the graph is exactly one directed cycle through every vertex.
    pub fn is_single_cycle(&self) -> bool {
        let n = self.len();
        n > 0
            && self.succ.iter().all(|s| s.len() == 1)
            && (0..n).all(|v| self.succ.iter().filter(|s| s.contains(&v)).count() == 1)
            && self.reachable(0).len() == n
    }

    /// `PS(m)`: every vertex with a path to `m`, including `m` itself.
    pub fn previous_set_of(&self, m: usize) -> BTreeSet<usize> {
        let mut out: BTreeSet<usize> = (0..self.len())
            .filter(|&v| self.reachable(v).contains(&m))
            .collect();
        out.insert(m);
        out
    }

    /// [`previous_set_of`](Self::previous_set_of) addressed by MD id.
    pub fn previous_set(&self, id: &str) -> Result<BTreeSet<String>> {
        let m = self
            .ids
            .iter()
            .position(|x| x == id)
            .ok_or_else(|| crate::error::Error::UnknownMd(id.to_string()))?;
        Ok(self
            .previous_set_of(m)
            .into_iter()
            .map(|v| self.ids[v].clone())
            .collect())
    }
}
