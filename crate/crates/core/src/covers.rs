//! The family Ω of `r_e`-covers and the cost it induces.
//!
//! An `r_e`-cover of element `e` is a sub-collection of exactly `r_e` sets,
//! each containing `e`. Identical covers owned by several elements are
//! stored once. Covers are ordered shortlex (by size, then lexicographically
//! by set index), which also fixes the variable order of the relaxation.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::Serialize;

use crate::instance::Problem;
use crate::lovasz::{mask_to_indices, SetFunction};
use crate::num::{Rational, Scalar};
use crate::oracle::{CostOracle, CostValue};

pub const DEFAULT_COVER_CAP: usize = 5000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverError {
    #[error("the cover family has more than {cap} members")]
    TooMany { cap: usize },
    #[error("cover index {index} out of range (family has {len} covers)")]
    BadIndex { index: usize, len: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cover {
    /// Member set indices, ascending.
    pub sets: Vec<usize>,
    #[serde(skip)]
    pub mask: u64,
    /// Elements for which this sub-collection is an `r_e`-cover.
    pub owners: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverFamily {
    covers: Vec<Cover>,
    by_element: Vec<Vec<usize>>,
}

/// Size first, then lexicographic on ascending member indices.
pub fn shortlex_cmp(a: u64, b: u64) -> Ordering {
    a.count_ones().cmp(&b.count_ones()).then_with(|| {
        let diff = a ^ b;
        if diff == 0 {
            Ordering::Equal
        } else if a & (diff & diff.wrapping_neg()) != 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    })
}

/// Calls `visit` with every `k`-subset of `items` (as a mask), in
/// lexicographic order of positions.
fn for_each_combination(items: &[usize], k: usize, mut visit: impl FnMut(u64) -> bool) {
    let n = items.len();
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mask = idx.iter().fold(0u64, |m, &i| m | 1 << items[i]);
        if !visit(mask) {
            return;
        }
        // Advance the rightmost position that can still move.
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl CoverFamily {
    pub fn len(&self) -> usize {
        self.covers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.covers.is_empty()
    }

    pub fn covers(&self) -> &[Cover] {
        &self.covers
    }

    pub fn cover(&self, index: usize) -> &Cover {
        &self.covers[index]
    }

    /// Indices of Ω_e.
    pub fn element_covers(&self, element: usize) -> &[usize] {
        &self.by_element[element]
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.by_element
    }

    /// Union of the member sets of the given covers.
    pub fn union_mask(&self, indices: &[usize]) -> Result<u64, CoverError> {
        indices.iter().try_fold(0u64, |m, &i| {
            self.covers
                .get(i)
                .map(|c| m | c.mask)
                .ok_or(CoverError::BadIndex { index: i, len: self.covers.len() })
        })
    }

    pub fn index_of(&self, mask: u64) -> Option<usize> {
        self.covers.binary_search_by(|c| shortlex_cmp(c.mask, mask)).ok()
    }
}

pub fn enumerate_covers(problem: &Problem) -> Result<CoverFamily, CoverError> {
    enumerate_covers_capped(problem, DEFAULT_COVER_CAP)
}

pub fn enumerate_covers_capped(problem: &Problem, cap: usize) -> Result<CoverFamily, CoverError> {
    let mut owners: HashMap<u64, Vec<usize>> = HashMap::new();
    for e in 0..problem.num_elements() {
        let members = mask_to_indices(problem.element_sets(e));
        let mut overflow = false;
        for_each_combination(&members, problem.requirement(e) as usize, |mask| {
            owners.entry(mask).or_default().push(e);
            overflow = owners.len() > cap;
            !overflow
        });
        if overflow {
            return Err(CoverError::TooMany { cap });
        }
    }
    let mut masks: Vec<u64> = owners.keys().copied().collect();
    masks.sort_by(|a, b| shortlex_cmp(*a, *b));
    let mut by_element = vec![Vec::new(); problem.num_elements()];
    let covers = masks
        .into_iter()
        .enumerate()
        .map(|(i, mask)| {
            let owners = owners.remove(&mask).unwrap_or_default();
            for &e in &owners {
                by_element[e].push(i);
            }
            Cover { sets: mask_to_indices(mask), mask, owners }
        })
        .collect();
    Ok(CoverFamily { covers, by_element })
}

/// `ρ(Ω') = ρ0(∪_{𝒜∈Ω'} 𝒜)` as a set function on cover indices.
pub struct InducedCost<'a> {
    oracle: &'a CostOracle,
    family: &'a CoverFamily,
}

impl<'a> InducedCost<'a> {
    pub fn new(oracle: &'a CostOracle, family: &'a CoverFamily) -> Self {
        InducedCost { oracle, family }
    }

    pub fn family(&self) -> &CoverFamily {
        self.family
    }

    pub fn oracle(&self) -> &CostOracle {
        self.oracle
    }

    pub fn eval_indices(&self, subfamily: &[usize]) -> Result<CostValue, CoverError> {
        Ok(self.oracle.eval(self.family.union_mask(subfamily)?))
    }
}

impl<T: Scalar> SetFunction<T> for InducedCost<'_> {
    fn ground_size(&self) -> usize {
        self.family.len()
    }

    fn eval(&self, subset: &[usize]) -> T {
        let mask = subset.iter().fold(0u64, |m, &i| m | self.family.covers[i].mask);
        self.oracle.eval_as(mask)
    }

    fn eval_chain(&self, order: &[usize]) -> Vec<T> {
        let mut mask = 0u64;
        let mut last: Option<(u64, T)> = None;
        order
            .iter()
            .map(|&i| {
                mask |= self.family.covers[i].mask;
                match &last {
                    Some((m, v)) if *m == mask => v.clone(),
                    _ => {
                        let v: T = self.oracle.eval_as(mask);
                        last = Some((mask, v.clone()));
                        v
                    }
                }
            })
            .collect()
    }
}

pub fn induced_cost_eval(ic: &InducedCost<'_>, subfamily: &[usize]) -> Result<CostValue, CoverError> {
    ic.eval_indices(subfamily)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coverage {
    /// Fully covered elements, ascending.
    pub elements: Vec<usize>,
    pub profit: Rational,
}

/// Elements `e` lying in at least `r_e` sets of the sub-collection.
pub fn fully_covered(problem: &Problem, subcollection: u64) -> Coverage {
    let elements: Vec<usize> = (0..problem.num_elements())
        .filter(|&e| (problem.element_sets(e) & subcollection).count_ones() >= problem.requirement(e))
        .collect();
    let profit = elements.iter().map(|&e| problem.profit(e)).sum();
    Coverage { elements, profit }
}

/// One cover inside the sub-collection per fully covered element (the first
/// qualifying one in family order), deduplicated and ascending.
pub fn lift_solution(problem: &Problem, family: &CoverFamily, subcollection: u64) -> Vec<usize> {
    let mut picked: Vec<usize> = fully_covered(problem, subcollection)
        .elements
        .into_iter()
        .filter_map(|e| {
            family
                .element_covers(e)
                .iter()
                .copied()
                .find(|&i| family.cover(i).mask & !subcollection == 0)
        })
        .collect();
    picked.sort_unstable();
    picked.dedup();
    picked
}
