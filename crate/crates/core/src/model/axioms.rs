//! Exhaustive (or seeded sampled) checks of the function-class axioms.

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use serde::Serialize;

use crate::committee::Committee;
use crate::error::{self, Error, Result};
use crate::model::utility::{Lb00, UtilityFunction};
use crate::rational::Rational;
use crate::surd::{Exact, Surd};

pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 20;

/// Outcome of one axiom: on failure, the witness `(T, j)` with `j ∈ T` is the
/// violation minimal by `(|T|, T, j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub holds: bool,
    pub witness: Option<(Committee, usize)>,
}

impl AxiomCheck {
    fn from_witness(witness: Option<(Committee, usize)>) -> Self {
        AxiomCheck {
            holds: witness.is_none(),
            witness,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    /// Violation means `u(T \ {j}) > u(T)`.
    pub monotone: AxiomCheck,
    /// Violation means `u(T) − u(T \ {j}) > 1`.
    pub lipschitz: AxiomCheck,
    pub subsets_checked: u64,
    pub sampled: bool,
}

impl AxiomReport {
    pub fn holds(&self) -> bool {
        self.monotone.holds && self.lipschitz.holds
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckBudget {
    Exhaustive { limit: usize },
    Sampled { samples: u64, seed: u64 },
}

impl Default for CheckBudget {
    fn default() -> Self {
        CheckBudget::Exhaustive {
            limit: DEFAULT_EXHAUSTIVE_LIMIT,
        }
    }
}

enum Table {
    Rational(Vec<Rational>),
    Surd(Vec<Surd>),
}

fn ensure_size(universe: &[usize], limit: usize) -> Result<()> {
    if universe.len() > limit {
        return Err(error::limit(
            "exhaustive subset enumeration",
            1u128 << universe.len().min(127),
            1u128 << limit.min(127),
        ));
    }
    Ok(())
}

fn value_table(u: &UtilityFunction, universe: &[usize]) -> Result<Table> {
    let size = 1usize << universe.len();
    if u.is_rational_valued() {
        let mut v = Vec::with_capacity(size);
        for mask in 0..size as u64 {
            v.push(u.evaluate(&Committee::from_mask(mask, universe))?);
        }
        Ok(Table::Rational(v))
    } else {
        let mut v = Vec::with_capacity(size);
        for mask in 0..size as u64 {
            v.push(u.value(&Committee::from_mask(mask, universe))?);
        }
        Ok(Table::Surd(v))
    }
}

fn keep_min(best: &mut Option<(Committee, usize)>, cand: (Committee, usize)) {
    let key = |w: &(Committee, usize)| (w.0.len(), w.0.clone(), w.1);
    if best.as_ref().is_none_or(|b| key(&cand) < key(b)) {
        *best = Some(cand);
    }
}

fn axioms_on_table<V: Exact>(values: &[V], universe: &[usize]) -> AxiomReport {
    let one = V::from_rational(Rational::one());
    let mut mono = None;
    let mut lip = None;
    for (mask, v) in values.iter().enumerate() {
        for (bit, &j) in universe.iter().enumerate() {
            if mask >> bit & 1 == 0 {
                continue;
            }
            let prev = &values[mask ^ (1 << bit)];
            if prev > v {
                keep_min(&mut mono, (Committee::from_mask(mask as u64, universe), j));
            }
            if v.minus(prev) > one {
                keep_min(&mut lip, (Committee::from_mask(mask as u64, universe), j));
            }
        }
    }
    AxiomReport {
        monotone: AxiomCheck::from_witness(mono),
        lipschitz: AxiomCheck::from_witness(lip),
        subsets_checked: values.len() as u64,
        sampled: false,
    }
}

/// Checks monotonicity and 1-Lipschitz over every `(T, j)` with `T ⊆ universe`.
pub fn check_axioms(u: &UtilityFunction, universe: &[usize]) -> Result<AxiomReport> {
    check_axioms_with(u, universe, CheckBudget::default())
}

pub fn check_axioms_with(
    u: &UtilityFunction,
    universe: &[usize],
    budget: CheckBudget,
) -> Result<AxiomReport> {
    match budget {
        CheckBudget::Exhaustive { limit } => {
            ensure_size(universe, limit)?;
            Ok(match value_table(u, universe)? {
                Table::Rational(v) => axioms_on_table(&v, universe),
                Table::Surd(v) => axioms_on_table(&v, universe),
            })
        }
        CheckBudget::Sampled { samples, seed } => sampled_axioms(u, universe, samples, seed),
    }
}

fn sampled_axioms(
    u: &UtilityFunction,
    universe: &[usize],
    samples: u64,
    seed: u64,
) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = Surd::one();
    let mut mono = None;
    let mut lip = None;
    for _ in 0..samples {
        let t: Committee = universe.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let v = u.value(&t)?;
        for j in t.iter() {
            let prev = u.value(&t.without(j))?;
            if prev > v {
                keep_min(&mut mono, (t.clone(), j));
            }
            if v.sub(&prev) > one {
                keep_min(&mut lip, (t.clone(), j));
            }
        }
    }
    Ok(AxiomReport {
        monotone: AxiomCheck::from_witness(mono),
        lipschitz: AxiomCheck::from_witness(lip),
        subsets_checked: samples,
        sampled: true,
    })
}

/// Exact check of an lb00 utility over its `(r+1)²` party-count grid. Only
/// the two named parties influence the value, so this is equivalent to the
/// exhaustive check over all subsets.
pub fn check_lb00_axioms(l: &Lb00) -> AxiomReport {
    let r = l.r();
    let one = Surd::one();
    let members = |p: usize| -> Vec<usize> {
        l.parties()
            .iter()
            .enumerate()
            .filter(|(_, q)| **q == Some(p))
            .map(|(c, _)| c)
            .collect()
    };
    let pa = members(l.primary());
    let pb = members(l.secondary());
    let witness_set = |ca: u32, cb: u32| -> Committee {
        pa.iter()
            .take(ca as usize)
            .chain(pb.iter().take(cb as usize))
            .copied()
            .collect()
    };
    let mut mono = None;
    let mut lip = None;
    let mut checked = 0u64;
    for ca in 0..=(pa.len() as u32).min(r) {
        for cb in 0..=(pb.len() as u32).min(r) {
            checked += 1;
            let v = l.value_at(ca, cb);
            let steps = [
                (ca > 0).then(|| (l.value_at(ca - 1, cb), pa[ca as usize - 1])),
                (cb > 0).then(|| (l.value_at(ca, cb - 1), pb[cb as usize - 1])),
            ];
            for (prev, j) in steps.into_iter().flatten() {
                if prev > v {
                    keep_min(&mut mono, (witness_set(ca, cb), j));
                }
                if v.sub(prev) > one {
                    keep_min(&mut lip, (witness_set(ca, cb), j));
                }
            }
        }
    }
    AxiomReport {
        monotone: AxiomCheck::from_witness(mono),
        lipschitz: AxiomCheck::from_witness(lip),
        subsets_checked: checked,
        sampled: false,
    }
}

fn self_bounding_on_table<V: Exact>(values: &[V], universe: &[usize]) -> Option<V> {
    let mut best: Option<V> = None;
    let zero = V::zero_value();
    for (mask, v) in values.iter().enumerate() {
        if *v <= zero {
            continue;
        }
        let mut total = V::zero_value();
        for bit in 0..universe.len() {
            if mask >> bit & 1 == 1 {
                total = total.plus(&v.minus(&values[mask ^ (1 << bit)]));
            }
        }
        let ratio = total.over(v);
        if best.as_ref().is_none_or(|b| ratio > *b) {
            best = Some(ratio);
        }
    }
    best
}

/// Minimal `β*` with `Σ_{j∈T} (u(T) − u(T\{j})) ≤ β*·u(T)` for all `T`.
///
/// The result is a `Surd` because the odd-exponent lb00 family takes
/// irrational values; it is rational for every other kind. A utility that is
/// zero everywhere yields 0.
pub fn self_bounding_constant(u: &UtilityFunction, universe: &[usize]) -> Result<Surd> {
    ensure_size(universe, DEFAULT_EXHAUSTIVE_LIMIT)?;
    Ok(match value_table(u, universe)? {
        Table::Rational(v) => self_bounding_on_table(&v, universe)
            .map(Surd::rational)
            .unwrap_or_else(Surd::zero),
        Table::Surd(v) => self_bounding_on_table(&v, universe).unwrap_or_else(Surd::zero),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelfBoundingCheck {
    pub holds: bool,
    /// The first `T` (by size, then lexicographic) violating the bound.
    pub witness: Option<Committee>,
}

fn is_self_bounding_on_table<V: Exact>(
    values: &[V],
    universe: &[usize],
    beta: &Rational,
) -> Option<Committee> {
    let mut best: Option<Committee> = None;
    for (mask, v) in values.iter().enumerate() {
        let mut total = V::zero_value();
        for bit in 0..universe.len() {
            if mask >> bit & 1 == 1 {
                total = total.plus(&v.minus(&values[mask ^ (1 << bit)]));
            }
        }
        if total > v.times_rational(beta) {
            let t = Committee::from_mask(mask as u64, universe);
            if best.as_ref().is_none_or(|b| (t.len(), &t) < (b.len(), b)) {
                best = Some(t);
            }
        }
    }
    best
}

/// Whether `u` is `β`-self-bounding on `universe`.
pub fn is_self_bounding(
    u: &UtilityFunction,
    universe: &[usize],
    beta: &Rational,
) -> Result<SelfBoundingCheck> {
    ensure_size(universe, DEFAULT_EXHAUSTIVE_LIMIT)?;
    let witness = match value_table(u, universe)? {
        Table::Rational(v) => is_self_bounding_on_table(&v, universe, beta),
        Table::Surd(v) => is_self_bounding_on_table(&v, universe, beta),
    };
    Ok(SelfBoundingCheck {
        holds: witness.is_none(),
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubmodularCheck {
    pub holds: bool,
    /// `(T1, T2, j)` with `T1 ⊆ T2`, `j ∈ T1` and
    /// `u(T1) − u(T1\{j}) < u(T2) − u(T2\{j})`.
    pub witness: Option<(Committee, Committee, usize)>,
}

fn submodular_on_table<V: Exact>(
    values: &[V],
    universe: &[usize],
) -> Option<(Committee, Committee, usize)> {
    // Diminishing returns along single-element steps is equivalent to the
    // pairwise definition; a violation at (T, j, l) is the pair
    // T1 = T + j ⊆ T2 = T + j + l.
    let n = universe.len();
    for mask in 0..values.len() {
        for jb in 0..n {
            if mask >> jb & 1 == 1 {
                continue;
            }
            let gain_small = values[mask | 1 << jb].minus(&values[mask]);
            for lb in 0..n {
                if lb == jb || mask >> lb & 1 == 1 {
                    continue;
                }
                let big = mask | 1 << lb;
                let gain_big = values[big | 1 << jb].minus(&values[big]);
                if gain_big > gain_small {
                    return Some((
                        Committee::from_mask((mask | 1 << jb) as u64, universe),
                        Committee::from_mask((big | 1 << jb) as u64, universe),
                        universe[jb],
                    ));
                }
            }
        }
    }
    None
}

/// Exhaustive submodularity test.
pub fn check_submodular(u: &UtilityFunction, universe: &[usize]) -> Result<SubmodularCheck> {
    ensure_size(universe, DEFAULT_EXHAUSTIVE_LIMIT)?;
    let witness = match value_table(u, universe)? {
        Table::Rational(v) => submodular_on_table(&v, universe),
        Table::Surd(v) => submodular_on_table(&v, universe),
    };
    Ok(SubmodularCheck {
        holds: witness.is_none(),
        witness,
    })
}

/// Axiom check used when an instance is built with the checking policy.
pub(crate) fn check_for_instance(u: &UtilityFunction, m: usize) -> Result<()> {
    if u.axioms_hold_structurally() {
        return Ok(());
    }
    let report = match u {
        UtilityFunction::Lb00(l) => check_lb00_axioms(l),
        _ => {
            let universe: Vec<usize> = (0..m).collect();
            check_axioms(u, &universe)?
        }
    };
    if let Some((t, j)) = &report.monotone.witness {
        return Err(Error::MalformedUtility(format!(
            "not monotone: u({}) < u({} without {j})",
            t, t
        )));
    }
    if let Some((t, j)) = &report.lipschitz.witness {
        return Err(Error::MalformedUtility(format!(
            "not 1-Lipschitz: removing {j} from {t} loses more than 1"
        )));
    }
    Ok(())
}
