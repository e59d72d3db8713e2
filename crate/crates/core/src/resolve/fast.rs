use std::collections::BTreeSet;

use num_bigint::BigUint;

use super::choice_vectors;
use crate::closure::{ta_closure, TaPartition};
use crate::error::{Error, Result};
use crate::md::{Label, MdSet};
use crate::relation::{AttrRef, Instance, Value};

/// All MRIs of an instance under a non-interacting or hit-simple-cyclic MD set,
/// described by one set of candidate values per closure block.
#[derive(Debug, Clone)]
pub struct MriFamily {
    base: Instance,
    label: Label,
    partition: TaPartition,
    candidates: Vec<Vec<Value>>,
}

impl MriFamily {
    pub fn base(&self) -> &Instance {
        &self.base
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn partition(&self) -> &TaPartition {
        &self.partition
    }

    /// Most frequent values of block `b`, ascending.
    pub fn candidates(&self, b: usize) -> &[Value] {
        &self.candidates[b]
    }

    /// Number of MRIs.
    pub fn count(&self) -> BigUint {
        self.candidates
            .iter()
            .fold(BigUint::from(1u8), |acc, c| acc * BigUint::from(c.len()))
    }

    /// Number of changed positions in every MRI.
    pub fn min_change(&self) -> usize {
        (0..self.partition.len())
            .map(|b| self.partition.blocks()[b].len() - self.partition.max_frequency(b))
            .sum()
    }

    /// The MRI given by one candidate index per block.
    pub fn instance_for(&self, choice: &[usize]) -> Instance {
        let mut out = self.base.clone();
        for (b, &c) in choice.iter().enumerate() {
            let v = &self.candidates[b][c];
            for &p in &self.partition.blocks()[b] {
                out.set(p, v.clone());
            }
        }
        out
    }

    /// The MRI that takes the smallest candidate in every block.
    pub fn canonical(&self) -> Instance {
        self.instance_for(&vec![0; self.candidates.len()])
    }

    /// Up to `limit` MRIs in canonical order, and whether the list was cut short.
    pub fn materialize(&self, limit: usize) -> (Vec<Instance>, bool) {
        let choosable: Vec<usize> = (0..self.candidates.len())
            .filter(|&b| self.candidates[b].len() > 1)
            .collect();
        let sizes: Vec<usize> = choosable.iter().map(|&b| self.candidates[b].len()).collect();
        let mut choice = vec![0; self.candidates.len()];
        let mut out = Vec::new();
        let mut truncated = false;
        for v in choice_vectors(&sizes) {
            if out.len() == limit {
                truncated = true;
                break;
            }
            for (&b, &c) in choosable.iter().zip(&v) {
                choice[b] = c;
            }
            out.push(self.instance_for(&choice));
        }
        out.sort();
        (out, truncated)
    }
}

fn eligible(d: &Instance, m: &MdSet) -> Result<Label> {
    let label = m.classify_on(d).label;
    if label.is_fast_eligible() {
        Ok(label)
    } else {
        Err(Error::NotFastEligible(label.to_string()))
    }
}

/// The MRIs of `d`: every closure block takes one of its most frequent values.
pub fn fast_mri_family(d: &Instance, m: &MdSet) -> Result<MriFamily> {
    let label = eligible(d, m)?;
    let partition = ta_closure(d, m);
    let candidates = (0..partition.len())
        .map(|b| partition.most_frequent(b))
        .collect();
    Ok(MriFamily {
        base: d.clone(),
        label,
        partition,
        candidates,
    })
}

/// Resolved answers to the projection of attribute `a`: the plain projection
/// for an unchangeable attribute; otherwise the values that strictly outnumber
/// every other value in a closure block containing a position of `a`.
pub fn resolved_values(d: &Instance, m: &MdSet, a: AttrRef) -> Result<BTreeSet<Value>> {
    eligible(d, m)?;
    if !m.changeable_attrs().contains(&a) {
        return Ok(d.column(a).map(|p| d.value(p).clone()).collect());
    }
    let part = ta_closure(d, m);
    Ok(d.column(a)
        .filter_map(|p| part.block_of(p).and_then(|b| part.strict_winner(b)).cloned())
        .collect())
}
