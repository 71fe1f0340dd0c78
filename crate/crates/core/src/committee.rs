//! Candidate subsets and enumeration helpers.

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

/// A set of candidate ids, kept sorted and deduplicated.
///
/// The derived ordering compares the sorted id sequences lexicographically,
/// which is the tie-break order used throughout the crate.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct Committee(Vec<usize>);

impl Committee {
    pub fn new<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        let mut v: Vec<usize> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Committee(v)
    }

    pub fn empty() -> Self {
        Committee(Vec::new())
    }

    /// Members of `universe` selected by the bits of `mask`.
    pub fn from_mask(mask: u64, universe: &[usize]) -> Self {
        Committee::new(
            universe
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &c)| c),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: usize) -> bool {
        self.0.binary_search(&c).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn max_id(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn with(&self, c: usize) -> Self {
        let mut v = self.0.clone();
        if let Err(pos) = v.binary_search(&c) {
            v.insert(pos, c);
        }
        Committee(v)
    }

    pub fn without(&self, c: usize) -> Self {
        Committee(self.0.iter().copied().filter(|&x| x != c).collect())
    }

    pub fn swap(&self, out: usize, inc: usize) -> Self {
        self.without(out).with(inc)
    }

    pub fn union(&self, o: &Committee) -> Self {
        Committee::new(self.iter().chain(o.iter()))
    }

    pub fn intersection(&self, o: &Committee) -> Self {
        Committee(self.iter().filter(|&c| o.contains(c)).collect())
    }

    pub fn difference(&self, o: &Committee) -> Self {
        Committee(self.iter().filter(|&c| !o.contains(c)).collect())
    }

    pub fn is_subset(&self, o: &Committee) -> bool {
        self.iter().all(|c| o.contains(c))
    }

    pub fn is_disjoint(&self, o: &Committee) -> bool {
        self.iter().all(|c| !o.contains(c))
    }

    /// Bit mask of this committee relative to `universe` (ids not in the
    /// universe are ignored).
    pub fn mask_in(&self, universe: &[usize]) -> u64 {
        let mut m = 0u64;
        for (i, &c) in universe.iter().enumerate() {
            if self.contains(c) {
                m |= 1 << i;
            }
        }
        m
    }
}

impl From<Vec<usize>> for Committee {
    fn from(v: Vec<usize>) -> Self {
        Committee::new(v)
    }
}

impl From<Committee> for Vec<usize> {
    fn from(c: Committee) -> Self {
        c.0
    }
}

impl FromIterator<usize> for Committee {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Committee::new(iter)
    }
}

impl fmt::Display for Committee {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().join(","))
    }
}

/// All `size`-subsets of `pool` in lexicographic order of positions.
pub fn combinations(pool: &[usize], size: usize) -> impl Iterator<Item = Committee> + '_ {
    pool.iter()
        .copied()
        .combinations(size)
        .map(Committee::new)
}

/// All subsets of `pool` of size at most `max`, by size then lexicographically.
pub fn subsets_up_to(pool: &[usize], max: usize) -> impl Iterator<Item = Committee> + '_ {
    (0..=max.min(pool.len())).flat_map(move |s| combinations(pool, s))
}

/// Binomial coefficient as u128, saturating.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Number of subsets of an `n`-set with size at most `k`, saturating.
pub fn count_up_to(n: usize, k: usize) -> u128 {
    (0..=k.min(n)).fold(0u128, |acc, s| acc.saturating_add(binomial(n, s)))
}
