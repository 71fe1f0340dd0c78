use rand::seq::SliceRandom;
use rand::Rng;

use super::FeasibilityFamily;
use crate::committee::Committee;
use crate::error::{self, Error, Result};

pub const DEFAULT_MATROID_CHECK_LIMIT: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatroidCheck {
    pub holds: bool,
    pub violation: Option<String>,
    pub independent_sets: u64,
}

/// Checks `∅ ∈ I`, downward closure and the exchange axiom over every pair of
/// subsets. Exhaustive, so limited to small ground sets.
pub fn verify_matroid_axioms(p: &FeasibilityFamily) -> Result<MatroidCheck> {
    let m = p.m();
    if m > DEFAULT_MATROID_CHECK_LIMIT {
        return Err(error::limit(
            "matroid axiom check",
            1u128 << m,
            1u128 << DEFAULT_MATROID_CHECK_LIMIT,
        ));
    }
    let universe = p.candidates();
    let size = 1usize << m;
    let indep: Vec<bool> = (0..size as u64)
        .map(|mask| p.is_feasible(&Committee::from_mask(mask, &universe)))
        .collect();
    let count = indep.iter().filter(|&&b| b).count() as u64;
    let fail = |msg: String| {
        Ok(MatroidCheck {
            holds: false,
            violation: Some(msg),
            independent_sets: count,
        })
    };
    if !indep[0] {
        return fail("the empty set is not independent".into());
    }
    for mask in 0..size {
        if !indep[mask] {
            continue;
        }
        for bit in 0..m {
            if mask >> bit & 1 == 1 && !indep[mask ^ (1 << bit)] {
                return fail(format!(
                    "{} is independent but {} is not",
                    Committee::from_mask(mask as u64, &universe),
                    Committee::from_mask((mask ^ (1 << bit)) as u64, &universe)
                ));
            }
        }
    }
    for a in 0..size {
        if !indep[a] {
            continue;
        }
        let la = (a as u64).count_ones();
        for b in 0..size {
            if !indep[b] || (b as u64).count_ones() <= la {
                continue;
            }
            let extra = b & !a;
            let ok = (0..m).any(|bit| extra >> bit & 1 == 1 && indep[a | 1 << bit]);
            if !ok {
                return fail(format!(
                    "exchange fails for A = {} and B = {}",
                    Committee::from_mask(a as u64, &universe),
                    Committee::from_mask(b as u64, &universe)
                ));
            }
        }
    }
    Ok(MatroidCheck {
        holds: true,
        violation: None,
        independent_sets: count,
    })
}

/// Independent and maximal.
pub fn is_basis(p: &FeasibilityFamily, w: &Committee) -> bool {
    p.is_feasible(w) && (0..p.m()).all(|c| w.contains(c) || !p.is_feasible(&w.with(c)))
}

/// Greedily adds `pool` candidates in id order while independence holds.
pub fn extend_to_basis(
    p: &FeasibilityFamily,
    t: &Committee,
    pool: &Committee,
) -> Result<Committee> {
    if !p.is_feasible(t) {
        return Err(Error::Membership(format!("{t} is not independent")));
    }
    let mut cur = t.clone();
    for c in pool.iter() {
        if !cur.contains(c) {
            let next = cur.with(c);
            if p.is_feasible(&next) {
                cur = next;
            }
        }
    }
    if is_basis(p, &cur) {
        Ok(cur)
    } else {
        Err(Error::CannotComplete(t.as_slice().to_vec()))
    }
}

pub fn greedy_basis(p: &FeasibilityFamily) -> Result<Committee> {
    let all: Committee = p.candidates().into_iter().collect();
    extend_to_basis(p, &Committee::empty(), &all)
}

/// Greedy basis over a uniformly shuffled candidate order.
pub fn random_basis<R: Rng + ?Sized>(p: &FeasibilityFamily, rng: &mut R) -> Result<Committee> {
    let mut order = p.candidates();
    order.shuffle(rng);
    let mut cur = Committee::empty();
    if !p.is_feasible(&cur) {
        return Err(Error::EmptyFamily);
    }
    for c in order {
        let next = cur.with(c);
        if p.is_feasible(&next) {
            cur = next;
        }
    }
    Ok(cur)
}

/// A bijection `f: W1\W2 → W2\W1` with `W1 − e + f(e)` independent for every
/// `e`, found as a perfect matching on valid single swaps (left side in id
/// order, right side tried in id order).
pub fn basis_exchange_bijection(
    p: &FeasibilityFamily,
    w1: &Committee,
    w2: &Committee,
) -> Result<Vec<(usize, usize)>> {
    for (name, w) in [("W1", w1), ("W2", w2)] {
        if !is_basis(p, w) {
            return Err(Error::NotABasis(format!("{name} = {w}")));
        }
    }
    let left: Vec<usize> = w1.difference(w2).iter().collect();
    let right: Vec<usize> = w2.difference(w1).iter().collect();
    if left.len() != right.len() {
        return Err(Error::MatroidAxiom(format!(
            "bases {w1} and {w2} have different sizes"
        )));
    }
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|&e| {
            (0..right.len())
                .filter(|&j| p.is_feasible(&w1.swap(e, right[j])))
                .collect()
        })
        .collect();
    let mut match_right: Vec<Option<usize>> = vec![None; right.len()];
    fn augment(
        u: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        match_right: &mut [Option<usize>],
    ) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if match_right[v].is_none_or(|w| augment(w, adj, seen, match_right)) {
                match_right[v] = Some(u);
                return true;
            }
        }
        false
    }
    for u in 0..left.len() {
        // Prefer the first free partner; fall back to augmenting paths.
        if let Some(&v) = adj[u].iter().find(|&&v| match_right[v].is_none()) {
            match_right[v] = Some(u);
            continue;
        }
        let mut seen = vec![false; right.len()];
        if !augment(u, &adj, &mut seen, &mut match_right) {
            return Err(Error::MatroidAxiom(format!(
                "no exchange bijection between {w1} and {w2}"
            )));
        }
    }
    let mut f: Vec<(usize, usize)> = match_right
        .iter()
        .enumerate()
        .map(|(j, u)| (left[u.expect("perfect matching")], right[j]))
        .collect();
    f.sort_unstable();
    for &(e, g) in &f {
        debug_assert!(p.is_feasible(&w1.swap(e, g)));
    }
    Ok(f)
}
