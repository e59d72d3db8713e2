use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;

use super::{choice_vectors, merge_partition};
use crate::error::{Error, Result};
use crate::md::MdSet;
use crate::relation::{AttrRef, Instance, Position, Value};

/// Limits for the brute-force oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_tuples: usize,
    /// Largest number of candidate values tried for one merge block.
    pub max_values: usize,
    /// Largest number of chase steps; `None` means `2 * |M| + 2`.
    pub max_depth: Option<usize>,
    /// Largest number of distinct instances visited.
    pub max_states: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_tuples: 12,
            max_values: 16,
            max_depth: None,
            max_states: 500_000,
        }
    }
}

impl Bounds {
    pub fn depth(&self, m: &MdSet) -> usize {
        self.max_depth.unwrap_or(2 * m.len() + 2)
    }
}

/// One instance of a chase sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChaseState {
    pub current: Instance,
    pub steps: usize,
}

impl ChaseState {
    pub fn start(d: &Instance) -> Self {
        ChaseState {
            current: d.clone(),
            steps: 0,
        }
    }
}

/// Blocks of the merge partition that still hold more than one value, each
/// with its candidate common values: the values it currently holds, plus one
/// fresh value when the block touches an attribute used in some similarity
/// condition. Returns `None` when `d` is stable.
fn pending(d: &Instance, m: &MdSet, lhs: &BTreeSet<AttrRef>) -> Option<Vec<(Vec<Position>, Vec<Value>)>> {
    let mut fresh = d.max_fresh();
    let blocks: Vec<_> = merge_partition(d, m)
        .into_iter()
        .filter_map(|b| {
            let mut vals: Vec<Value> = b
                .iter()
                .map(|&p| d.value(p).clone())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            if vals.len() < 2 {
                return None;
            }
            if b.iter().any(|p| lhs.contains(&p.attr_ref())) {
                fresh += 1;
                vals.push(Value::Fresh(fresh));
            }
            Some((b, vals))
        })
        .collect();
    (!blocks.is_empty()).then_some(blocks)
}

fn lhs_attrs(m: &MdSet) -> BTreeSet<AttrRef> {
    m.mds().iter().flat_map(|md| md.lhs_attrs()).collect()
}

fn successors(
    d: &Instance,
    m: &MdSet,
    lhs: &BTreeSet<AttrRef>,
    max_values: usize,
) -> Result<Option<Vec<Instance>>> {
    let Some(blocks) = pending(d, m, lhs) else {
        return Ok(None);
    };
    if let Some((b, vals)) = blocks.iter().find(|(_, v)| v.len() > max_values) {
        return Err(Error::BoundsExceeded(format!(
            "a merge block at {} has {} candidate values (limit {max_values})",
            d.position_label(b[0]),
            vals.len()
        )));
    }
    let sizes: Vec<usize> = blocks.iter().map(|(_, v)| v.len()).collect();
    let out = choice_vectors(&sizes)
        .map(|choice| {
            let mut next = d.clone();
            for ((block, vals), &c) in blocks.iter().zip(&choice) {
                for &p in block {
                    next.set(p, vals[c].clone());
                }
            }
            next.canonicalize_fresh();
            next
        })
        .collect();
    Ok(Some(out))
}

/// One chase step: every block of the merge partition that holds more than
/// one value is set to a common candidate value, in every combination. A
/// stable instance has itself as its only successor.
pub fn chase_step(s: &ChaseState, m: &MdSet) -> Vec<ChaseState> {
    match successors(&s.current, m, &lhs_attrs(m), usize::MAX) {
        Ok(Some(next)) => next
            .into_iter()
            .map(|current| ChaseState {
                current,
                steps: s.steps + 1,
            })
            .collect(),
        _ => vec![s.clone()],
    }
}

/// Outcome of the oracle.
#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Stable instances with the fewest changes, canonically ordered.
    pub mris: Vec<Instance>,
    pub min_change: usize,
    /// Distinct stable instances reached.
    pub resolved: usize,
    /// Distinct instances visited.
    pub states: usize,
    /// Chase steps needed before every branch was stable.
    pub depth: usize,
}

/// Enumerates resolved instances by breadth-first chase with deduplication,
/// keeping those with the fewest changed positions.
pub fn enumerate_mris_oracle(d: &Instance, m: &MdSet, bounds: &Bounds) -> Result<OracleResult> {
    if d.len() > bounds.max_tuples {
        return Err(Error::BoundsExceeded(format!(
            "instance has {} tuples (limit {})",
            d.len(),
            bounds.max_tuples
        )));
    }
    let lhs = lhs_attrs(m);
    let max_depth = bounds.depth(m);
    let mut start = d.clone();
    start.canonicalize_fresh();
    let mut visited: HashSet<Instance> = HashSet::from([start.clone()]);
    let mut frontier = vec![start];
    let mut stable: Vec<Instance> = Vec::new();
    let mut depth = 0;
    while !frontier.is_empty() {
        let expanded: Vec<Result<Option<Vec<Instance>>>> = frontier
            .par_iter()
            .map(|s| successors(s, m, &lhs, bounds.max_values))
            .collect();
        let mut next = Vec::new();
        for (s, r) in frontier.into_iter().zip(expanded) {
            match r? {
                None => stable.push(s),
                Some(succ) => {
                    if depth == max_depth {
                        return Err(Error::BoundsExceeded(format!(
                            "instances are still unstable after {max_depth} chase steps"
                        )));
                    }
                    for x in succ {
                        if !visited.contains(&x) {
                            visited.insert(x.clone());
                            next.push(x);
                        }
                    }
                }
            }
        }
        if visited.len() > bounds.max_states {
            return Err(Error::BoundsExceeded(format!(
                "more than {} instances visited",
                bounds.max_states
            )));
        }
        if !next.is_empty() {
            depth += 1;
        }
        frontier = next;
    }
    let changes: Vec<usize> = stable.iter().map(|s| d.change_count(s)).collect();
    let min_change = changes.iter().copied().min().unwrap_or(0);
    let mut mris: Vec<Instance> = stable
        .iter()
        .zip(&changes)
        .filter(|(_, &c)| c == min_change)
        .map(|(s, _)| s.clone())
        .collect();
    mris.sort();
    mris.dedup();
    Ok(OracleResult {
        mris,
        min_change,
        resolved: stable.len(),
        states: visited.len(),
        depth,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::relation::{RawRow, Schema, Tid};
    use crate::resolve::is_stable;
    use crate::resolve::tests::{two_groups, two_relation_chain};
    use crate::similarity::{Similarities, SimilaritySpec};

    fn b_column(d: &Instance) -> Vec<String> {
        d.tuples(0).map(|(_, v)| v[1].to_string()).collect()
    }

    #[test]
    fn example_two_one_successors_and_mris() {
        let (d, m) = two_groups();
        let next = chase_step(&ChaseState::start(&d), &m);
        assert_eq!(next.len(), 4);
        let r = enumerate_mris_oracle(&d, &m, &Bounds::default()).unwrap();
        assert_eq!(r.min_change, 2);
        let got: Vec<Vec<String>> = r.mris.iter().map(b_column).collect();
        assert_eq!(
            got,
            [
                ["c1", "c1", "c3", "c3"],
                ["c1", "c1", "c4", "c4"],
                ["c2", "c2", "c3", "c3"],
                ["c2", "c2", "c4", "c4"]
            ]
        );
        assert!(r.mris.iter().all(|x| is_stable(x, &m)));
    }

    #[test]
    fn stable_instance_is_its_own_successor() {
        let (d, m) = two_groups();
        let r = enumerate_mris_oracle(&d, &m, &Bounds::default()).unwrap();
        let s = ChaseState::start(&r.mris[0]);
        assert_eq!(chase_step(&s, &m), vec![s.clone()]);
        let again = enumerate_mris_oracle(&r.mris[0], &m, &Bounds::default()).unwrap();
        assert_eq!(again.mris, vec![r.mris[0].clone()]);
        assert_eq!(again.min_change, 0);
    }

    #[test]
    fn example_three_one_first_step() {
        let (d, m) = two_relation_chain();
        let next = chase_step(&ChaseState::start(&d), &m);
        let b = |x: &Instance, rel: usize, t: u64| x.tuple(rel, Tid(t)).unwrap()[1].to_string();
        let shapes: BTreeSet<[String; 4]> = next
            .iter()
            .map(|s| {
                let x = &s.current;
                [b(x, 0, 1), b(x, 1, 2), b(x, 0, 3), b(x, 1, 4)]
            })
            .collect();
        let want = |v: [&str; 4]| v.map(String::from);
        assert!(shapes.contains(&want(["d", "d", "c", "c"])));
        assert!(shapes.contains(&want(["c", "c", "c", "c"])));
    }

    #[test]
    fn bounds_are_enforced() {
        let (d, m) = two_groups();
        let tight = Bounds {
            max_tuples: 3,
            ..Bounds::default()
        };
        assert!(matches!(
            enumerate_mris_oracle(&d, &m, &tight),
            Err(Error::BoundsExceeded(_))
        ));
        let narrow = Bounds {
            max_values: 1,
            ..Bounds::default()
        };
        assert!(enumerate_mris_oracle(&d, &m, &narrow).is_err());
    }

    #[test]
    fn simple_cycle_has_sixteen_mris() {
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
        let rows = [["a1", "d1"], ["a2", "e2"], ["b1", "e1"], ["b2", "d2"]];
        let d = Instance::load(s, [("R", rows.iter().map(|r| RawRow::new(*r)).collect())]).unwrap();
        let r = enumerate_mris_oracle(&d, &m, &Bounds::default()).unwrap();
        assert_eq!(r.mris.len(), 16);
        assert_eq!(r.min_change, 6);
    }
}
