//! Disjoint-set forest over arbitrary hashable keys.

use std::collections::HashMap;
use std::hash::Hash;

/// Union by size with path compression.
#[derive(Debug, Clone)]
pub struct UnionFind<K> {
    index: HashMap<K, usize>,
    keys: Vec<K>,
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl<K: Clone + Eq + Hash + Ord> Default for UnionFind<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Clone + Eq + Hash + Ord> UnionFind<K> {
    pub fn new() -> Self {
        UnionFind {
            index: HashMap::new(),
            keys: Vec::new(),
            parent: Vec::new(),
            size: Vec::new(),
        }
    }

    /// Registers `k` as a singleton if it is not known yet and returns its slot.
    pub fn add(&mut self, k: K) -> usize {
        if let Some(&i) = self.index.get(&k) {
            return i;
        }
        let i = self.keys.len();
        self.index.insert(k.clone(), i);
        self.keys.push(k);
        self.parent.push(i);
        self.size.push(1);
        i
    }

    fn root(&mut self, mut i: usize) -> usize {
        let mut r = i;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        while self.parent[i] != r {
            let next = self.parent[i];
            self.parent[i] = r;
            i = next;
        }
        r
    }

    pub fn union(&mut self, a: K, b: K) {
        let (a, b) = (self.add(a), self.add(b));
        let (mut ra, mut rb) = (self.root(a), self.root(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }

    pub fn same(&mut self, a: &K, b: &K) -> bool {
        match (self.index.get(a).copied(), self.index.get(b).copied()) {
            (Some(x), Some(y)) => self.root(x) == self.root(y),
            _ => a == b,
        }
    }

    pub fn contains(&self, k: &K) -> bool {
        self.index.contains_key(k)
    }

    /// All classes, each sorted, ordered by their smallest member.
    pub fn classes(&mut self) -> Vec<Vec<K>> {
        let mut groups: HashMap<usize, Vec<K>> = HashMap::new();
        for i in 0..self.keys.len() {
            let r = self.root(i);
            groups.entry(r).or_default().push(self.keys[i].clone());
        }
        let mut out: Vec<Vec<K>> = groups
            .into_values()
            .map(|mut g| {
                g.sort();
                g
            })
            .collect();
        out.sort();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unions_are_transitive() {
        let mut uf = UnionFind::new();
        uf.union(3, 1);
        uf.union(1, 5);
        uf.add(9);
        uf.union(7, 8);
        assert!(uf.same(&3, &5));
        assert!(!uf.same(&3, &7));
        assert!(uf.same(&4, &4));
        assert_eq!(uf.classes(), vec![vec![1, 3, 5], vec![7, 8], vec![9]]);
    }
}
