//! Resolved instances: stability, modifiable values, the chase oracle and the
//! closure-based MRI family for non-interacting and hit-simple-cyclic MD sets.

mod chase;
mod fast;

use std::collections::BTreeSet;

pub use chase::{chase_step, enumerate_mris_oracle, Bounds, ChaseState, OracleResult};
pub use fast::{fast_mri_family, resolved_values, MriFamily};

use crate::md::MdSet;
use crate::relation::{Instance, Position};
use crate::unionfind::UnionFind;

/// Calls `f(p, q)` for every pair of positions an MD forces to agree in `d`:
/// `p = (t1, C)` and `q = (t2, E)` for a corresponding pair `(C, E)` of an MD
/// whose similarity condition holds for `t1`, `t2`.
fn for_each_link(d: &Instance, m: &MdSet, mut f: impl FnMut(Position, Position)) {
    for md in m.mds() {
        for (t1, t2) in md.similar_pairs(m.sims(), d) {
            for p in &md.rhs {
                f(
                    Position::new(md.left, t1, p.left.attr),
                    Position::new(md.right, t2, p.right.attr),
                );
            }
        }
    }
}

/// Whether `(d, d)` satisfies `m`: every similar pair already agrees on its
/// right-hand sides.
pub fn is_stable(d: &Instance, m: &MdSet) -> bool {
    let mut ok = true;
    for_each_link(d, m, |p, q| ok &= d.value(p) == d.value(q));
    ok
}

/// Positions that some MD forces to agree in `d`, grouped transitively.
/// Only groups with at least two positions are returned, in canonical order.
pub fn merge_partition(d: &Instance, m: &MdSet) -> Vec<Vec<Position>> {
    let mut uf = UnionFind::new();
    for_each_link(d, m, |p, q| {
        if p != q {
            uf.union(p, q);
        }
    });
    uf.classes().into_iter().filter(|b| b.len() > 1).collect()
}

/// The modifiable values of `d`: the least set containing every position whose
/// value differs from its partner under some similar pair, closed under
/// propagation along similar pairs.
pub fn modifiable_positions(d: &Instance, m: &MdSet) -> BTreeSet<Position> {
    let mut links = Vec::new();
    for_each_link(d, m, |p, q| links.push((p, q)));
    let mut out: BTreeSet<Position> = BTreeSet::new();
    for &(p, q) in &links {
        if d.value(p) != d.value(q) {
            out.insert(p);
            out.insert(q);
        }
    }
    loop {
        let before = out.len();
        for &(p, q) in &links {
            if out.contains(&q) {
                out.insert(p);
            }
            if out.contains(&p) {
                out.insert(q);
            }
        }
        if out.len() == before {
            return out;
        }
    }
}

/// Every index vector `v` with `v[i] < sizes[i]`, in lexicographic order.
pub(crate) fn choice_vectors(sizes: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let mut next = (!sizes.contains(&0)).then(|| vec![0; sizes.len()]);
    std::iter::from_fn(move || {
        let cur = next.take()?;
        let mut v = cur.clone();
        for i in (0..v.len()).rev() {
            v[i] += 1;
            if v[i] < sizes[i] {
                next = Some(v);
                break;
            }
            v[i] = 0;
        }
        Some(cur)
    })
}
