//! Ground truth by exhaustive enumeration of weak orders.
//!
//! A weak order on `n` elements is an ordered partition into indifference
//! classes, stored as a rank vector with contiguous levels (level 0 is the
//! top class). Completeness and transitivity hold by construction, so only
//! seed containment and coherency are filtered.

use rayon::prelude::*;
use serde::Serialize;

use crate::bitmatrix::BitMatrix;
use crate::closure::RelationState;
use crate::error::{Error, Result};
use crate::model::{ElementId, Scenario};
use crate::solver::{
    Elimination, EliminationReason, ForcedMap, OptionSet, PairOption, PairVerdict,
};

pub const DEFAULT_CAP: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct WeakOrder {
    levels: Vec<usize>,
}

impl WeakOrder {
    /// Accepts a rank vector whose levels are exactly `0..k` for some `k`.
    pub fn from_levels(levels: Vec<usize>) -> Option<Self> {
        let k = levels.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; k];
        for &l in &levels {
            seen[l] = true;
        }
        seen.iter().all(|&b| b).then_some(WeakOrder { levels })
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn class_count(&self) -> usize {
        self.levels.iter().max().map_or(0, |m| m + 1)
    }

    #[inline]
    pub fn weak(&self, x: ElementId, y: ElementId) -> bool {
        self.levels[x] <= self.levels[y]
    }

    #[inline]
    pub fn strict(&self, x: ElementId, y: ElementId) -> bool {
        self.levels[x] < self.levels[y]
    }

    pub fn option(&self, first: ElementId, second: ElementId) -> PairOption {
        match self.levels[first].cmp(&self.levels[second]) {
            std::cmp::Ordering::Less => PairOption::Above,
            std::cmp::Ordering::Greater => PairOption::Below,
            std::cmp::Ordering::Equal => PairOption::Indifferent,
        }
    }

    pub fn to_state(&self) -> RelationState {
        let n = self.levels.len();
        let mut w = BitMatrix::new(n);
        let mut d = BitMatrix::new(n);
        for x in 0..n {
            for y in 0..n {
                if self.weak(x, y) {
                    w.set(x, y);
                }
                if self.strict(x, y) {
                    d.set(x, y);
                }
            }
        }
        RelationState::from_layers(w, d)
    }

    /// Rank vector of a complete state's weak layer, if it is a weak order.
    pub fn from_state(state: &RelationState) -> Option<Self> {
        let n = state.len();
        if !state.is_complete() {
            return None;
        }
        // level = number of classes strictly above
        let mut above: Vec<usize> = (0..n)
            .map(|x| {
                (0..n)
                    .filter(|&y| state.weak(y, x) && !state.weak(x, y))
                    .count()
            })
            .collect();
        let mut distinct = above.clone();
        distinct.sort_unstable();
        distinct.dedup();
        for l in &mut above {
            *l = distinct.binary_search(l).unwrap();
        }
        let wo = WeakOrder { levels: above };
        (wo.to_state().weak_layer() == state.weak_layer()).then_some(wo)
    }
}

/// Number of weak orders on `n` labelled elements:
/// `a(0) = 1`, `a(n) = Σ_{k=1..n} C(n,k) a(n-k)`.
pub fn ordered_bell(n: usize) -> u128 {
    let mut a = vec![1u128; n + 1];
    for m in 1..=n {
        let mut binom = 1u128;
        let mut total = 0u128;
        for k in 1..=m {
            binom = binom * (m - k + 1) as u128 / k as u128;
            total += binom * a[m - k];
        }
        a[m] = total;
    }
    a[n]
}

/// Restricted growth strings of length `n`, i.e. set partitions.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut rgs = vec![0usize; n];
    loop {
        out.push(rgs.clone());
        // rightmost position that can still grow
        let mut prefix_max = vec![0usize; n];
        for i in 1..n {
            prefix_max[i] = prefix_max[i - 1].max(rgs[i - 1]);
        }
        let Some(i) = (1..n).rev().find(|&i| rgs[i] <= prefix_max[i]) else {
            return out;
        };
        rgs[i] += 1;
        for r in &mut rgs[i + 1..] {
            *r = 0;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Every ordering of the blocks of one set partition.
fn orderings(rgs: &[usize]) -> impl Iterator<Item = WeakOrder> + '_ {
    let k = rgs.iter().max().map_or(0, |m| m + 1);
    let mut perm: Vec<usize> = (0..k).collect();
    let mut first = true;
    std::iter::from_fn(move || {
        if !first && !next_permutation(&mut perm) {
            return None;
        }
        first = false;
        Some(WeakOrder {
            levels: rgs.iter().map(|&b| perm[b]).collect(),
        })
    })
}

/// Same orderings as [`orderings`], written into one reused buffer.
fn for_each_ordering(rgs: &[usize], mut visit: impl FnMut(&[usize])) {
    let k = rgs.iter().max().map_or(0, |m| m + 1);
    let mut perm: Vec<usize> = (0..k).collect();
    let mut levels = vec![0; rgs.len()];
    loop {
        for (l, &b) in levels.iter_mut().zip(rgs) {
            *l = perm[b];
        }
        visit(&levels);
        if !next_permutation(&mut perm) {
            return;
        }
    }
}

/// Stream of every weak order on `n` elements, each exactly once.
pub fn enumerate_weak_orders(n: usize, cap: usize) -> Result<impl Iterator<Item = WeakOrder>> {
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    Ok(set_partitions(n)
        .into_iter()
        .flat_map(|rgs| orderings(&rgs).collect::<Vec<_>>()))
}

/// Seed containment plus forward coherency for weak and strict parts.
pub fn is_coherent_extension(s: &Scenario, order: &WeakOrder) -> bool {
    coherent_levels(s, &order.levels)
}

fn coherent_levels(s: &Scenario, levels: &[usize]) -> bool {
    if !s.base_strict().iter().all(|&(x, y)| levels[x] < levels[y]) {
        return false;
    }
    if !s.base_weak().iter().all(|&(x, y)| levels[x] <= levels[y]) {
        return false;
    }
    let n = s.len();
    s.generators().iter().all(|g| {
        let table = g.table();
        (0..n).all(|x| {
            let Some(gx) = table[x] else { return true };
            (0..n).all(|y| {
                let Some(gy) = table[y] else { return true };
                (levels[x] > levels[y] || levels[gx] <= levels[gy])
                    && (levels[x] >= levels[y] || levels[gx] < levels[gy])
            })
        })
    })
}

/// All coherent weak orders on the window that extend the seed, in
/// enumeration order.
pub fn oracle_extensions(s: &Scenario, cap: usize) -> Result<Vec<WeakOrder>> {
    let n = s.len();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    Ok(set_partitions(n)
        .par_iter()
        .flat_map_iter(|rgs| {
            let mut found = Vec::new();
            for_each_ordering(rgs, |levels| {
                if coherent_levels(s, levels) {
                    found.push(WeakOrder {
                        levels: levels.to_vec(),
                    });
                }
            });
            found
        })
        .collect())
}

/// Pair verdicts obtained by intersecting every surviving weak order.
pub fn oracle_forced_set(s: &Scenario, cap: usize) -> Result<ForcedMap> {
    let extensions = oracle_extensions(s, cap)?;
    if extensions.is_empty() {
        return Err(Error::Unsatisfiable);
    }
    Ok(forced_from_orders(s.len(), &extensions))
}

pub fn forced_from_orders(n: usize, orders: &[WeakOrder]) -> ForcedMap {
    let mut out = ForcedMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let surviving: OptionSet = orders.iter().map(|o| o.option(i, j)).collect();
            let eliminated = PairOption::ALL
                .into_iter()
                .filter(|o| !surviving.contains(*o))
                .map(|option| Elimination {
                    option,
                    reason: EliminationReason::NoCandidate,
                })
                .collect();
            out.insert((i, j), PairVerdict::new(i, j, surviving, eliminated));
        }
    }
    out
}
